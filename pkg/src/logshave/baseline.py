"""First two rungs of the solver ladder.

* meet_in_the_middle — split, enumerate both halves sorted, two-pointer
  scan: the exact deterministic O(2^(n/2)) baseline.
* bit_packing — additionally peels a small set D, hashes both half
  lists down to short fingerprints, packs many fingerprints per machine
  word, and scans word pairs with a single packed compare per step,
  descending to an exact sublist scan only when fingerprints match.
  Without a cutoff the outcome is exact for every hash draw (the
  near-additivity of the hash makes the packed test complete; hashing
  affects only how often the descent is a false alarm); with a cutoff
  the run may stop early and report no (one-sided error).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from ._rng import SplitMix64, derive_seed
from .core import Instance, Verdict
from .enumeration import SumList, enumerate_indices
from .hashing import default_out_bits, draw_hash, hash_eval
from .wordram import Machine, PackedWord, ceil_log2, pack_values, packed_hash_compare

__all__ = [
    "Partition",
    "BitPackConfig",
    "meet_in_the_middle",
    "mitm_two_pointer",
    "bit_packing",
    "bit_packing_advance",
    "canonical_partition",
]


@dataclass(frozen=True)
class Partition:
    """Disjoint index sets covering the instance's value positions."""

    a_idx: tuple[int, ...]
    b_idx: tuple[int, ...]
    c_idx: tuple[int, ...] = ()
    d_idx: tuple[int, ...] = ()

    def __post_init__(self):
        groups = (self.a_idx, self.b_idx, self.c_idx, self.d_idx)
        seen: set[int] = set()
        for g in groups:
            for i in g:
                if i in seen:
                    raise ValueError(f"index {i} appears in two partition classes")
                seen.add(i)

    def covers(self, n: int) -> bool:
        return (
            len(self.a_idx) + len(self.b_idx) + len(self.c_idx) + len(self.d_idx) == n
        )


def canonical_partition(n: int, c_size: int = 0, d_size: int = 0) -> Partition:
    """Deterministic layout: C takes the last indices, D just before it,
    and the remainder splits into A (ceil) and B (floor)."""
    if c_size + d_size > n:
        raise ValueError("partition classes exceed n")
    c_idx = tuple(range(n - c_size, n))
    d_idx = tuple(range(n - c_size - d_size, n - c_size))
    rest = n - c_size - d_size
    half = (rest + 1) // 2
    a_idx = tuple(range(half))
    b_idx = tuple(range(half, rest))
    return Partition(a_idx=a_idx, b_idx=b_idx, c_idx=c_idx, d_idx=d_idx)


def mitm_two_pointer(
    la, lb, target: int, machine: Machine | None = None
) -> tuple[int, int] | None:
    """Two-pointer scan of two ascending lists for a pair summing to target.

    Accepts SumLists or plain sequences; returns the sum pair or None.
    One unit per pointer step.
    """
    sums_a = la.sums if isinstance(la, SumList) else la
    sums_b = lb.sums if isinstance(lb, SumList) else lb
    hit = _two_pointer_indices(sums_a, sums_b, target, machine)
    if hit is None:
        return None
    i, j = hit
    return sums_a[i], sums_b[j]


def _two_pointer_indices(sums_a, sums_b, target, machine, lo_a=0, hi_a=None, lo_b=0, hi_b=None):
    """Index-returning core of the two-pointer scan over slices."""
    if hi_a is None:
        hi_a = len(sums_a)
    if hi_b is None:
        hi_b = len(sums_b)
    i = lo_a
    j = hi_b - 1
    steps = 0
    found = None
    while i < hi_a and j >= lo_b:
        s = sums_a[i] + sums_b[j]
        steps += 1
        if s == target:
            found = (i, j)
            break
        if s < target:
            i += 1
        else:
            j -= 1
    if machine is not None:
        machine.unit(steps)
    return found


def meet_in_the_middle(
    inst: Instance,
    machine: Machine | None = None,
    report: dict | None = None,
) -> Verdict:
    """Exact deterministic decision with witness via half-list scanning."""
    if inst.n < 2:
        # a single value either is the target or is not
        if inst.values[0] == inst.target:
            return Verdict.yes(inst, 1)
        return Verdict.no()
    if machine is None and report is None:
        from ._backend import kernels

        res = kernels.mim_decide(inst.values, inst.target, inst.word_len)
        if res is not NotImplemented:
            if res is None:
                return Verdict.no()
            return Verdict.yes(inst, res)
    if machine is None:
        machine = Machine(inst.word_len, model="circuit")
    start_cost = machine.charged_cost
    t0 = time.perf_counter_ns()
    part = canonical_partition(inst.n)
    la = enumerate_indices(inst.values, part.a_idx, machine=machine, with_masks=True)
    lb = enumerate_indices(inst.values, part.b_idx, machine=machine, with_masks=True)
    hit = _two_pointer_indices(la.sums, lb.sums, inst.target, machine)
    verdict: Verdict
    if hit is None:
        verdict = Verdict.no()
    else:
        i, j = hit
        verdict = Verdict.yes(inst, la.masks[i] | lb.masks[j])
    if report is not None:
        report.update(
            algorithm="mim",
            n=inst.n,
            ell=machine.word_len,
            mode=machine.model,
            seed=0,
            verdict="yes" if verdict.answer else "no",
            charged_cost=machine.charged_cost - start_cost,
            wall_ns=time.perf_counter_ns() - t0,
        )
    return verdict


@dataclass(frozen=True)
class BitPackConfig:
    """Knobs of the packed scan.

    hash_bits defaults to 3*ceil(log2(word_len)); d_size to
    round(log2(word_len)) with a floor of 1.  cutoff_factor, when set,
    halts the run once the charged cost exceeds cutoff_factor *
    2^(n/2) * word_len^(-1/2) * log2(word_len) and reports no.
    """

    hash_bits: int | None = None
    d_size: int | None = None
    mode: str = "circuit"
    cutoff_factor: float | None = None

    def resolved(self, word_len: int) -> tuple[int, int]:
        m = self.hash_bits if self.hash_bits is not None else default_out_bits(word_len)
        if not (1 <= m <= word_len):
            raise ValueError(f"hash width {m} incompatible with word length {word_len}")
        d = self.d_size if self.d_size is not None else round(math.log2(word_len))
        return m, max(1, d)


def bit_packing_advance(a_word_max: int, b_word_min: int, t_prime: int) -> str:
    """Word-level pointer rule: move right in A when even the largest sum
    of A's current word plus the smallest of B's cannot reach t_prime."""
    if a_word_max + b_word_min < t_prime:
        return "increment_i"
    return "decrement_j"


def _hash_and_pack(sums: tuple[int, ...], h, m: int, machine: Machine) -> list[PackedWord]:
    hashes = [hash_eval(h, s, machine) for s in sums]
    return pack_values(hashes, m, machine.word_len, machine)


def bit_packing(
    inst: Instance,
    cfg: BitPackConfig | None = None,
    rng_seed: int = 0,
    machine: Machine | None = None,
    partition: Partition | None = None,
    report: dict | None = None,
) -> Verdict:
    """Packed-fingerprint scan; exact without cutoff, one-sided with."""
    cfg = cfg or BitPackConfig()
    if (
        machine is None
        and report is None
        and partition is None
        and cfg.cutoff_factor is None
        and cfg.hash_bits is None
        and cfg.d_size is None
    ):
        from ._backend import kernels

        res = kernels.bitpack_decide(
            inst.values, inst.target, inst.word_len, rng_seed
        )
        if res is not NotImplemented:
            if res is None:
                return Verdict.no(rng_seed=rng_seed)
            return Verdict.yes(inst, res, rng_seed=rng_seed)
    if machine is None:
        machine = Machine(inst.word_len, model=cfg.mode)
    ell = machine.word_len
    m, d_size = cfg.resolved(ell)
    n = inst.n
    if n < d_size + 2:
        raise ValueError(f"instance too small: need n >= {d_size + 2}")
    if partition is None:
        partition = canonical_partition(n, c_size=0, d_size=d_size)
    start_cost = machine.charged_cost
    t0 = time.perf_counter_ns()
    budget: float | None = None
    if cfg.cutoff_factor is not None:
        budget = cfg.cutoff_factor * (2.0 ** (n / 2)) * (ell**-0.5) * max(
            1, ceil_log2(ell)
        )

    rng = SplitMix64(derive_seed(rng_seed, "bitpack-hash"))
    h = draw_hash(ell, m, rng)
    wd = enumerate_indices(inst.values, partition.d_idx, machine=machine, with_masks=True)
    la = enumerate_indices(inst.values, partition.a_idx, machine=machine, with_masks=True)
    lb = enumerate_indices(inst.values, partition.b_idx, machine=machine, with_masks=True)
    words_a = _hash_and_pack(la.sums, h, m, machine)
    words_b = _hash_and_pack(lb.sums, h, m, machine)
    cap = machine.capacity(m)

    collisions = 0
    descents = 0
    word_pairs = 0
    verdict: Verdict | None = None
    truncated = False

    for d_pos, d_sum in enumerate(wd.sums):
        t_prime = inst.target - d_sum
        machine.unit(1)
        if t_prime < 0:
            continue
        ht = hash_eval(h, t_prime, machine)
        i = 0
        j = len(words_b) - 1
        while i < len(words_a) and j >= 0:
            word_pairs += 1
            if packed_hash_compare(machine, words_a[i], words_b[j], ht):
                descents += 1
                hit = _two_pointer_indices(
                    la.sums,
                    lb.sums,
                    t_prime,
                    machine,
                    lo_a=i * cap,
                    hi_a=min((i + 1) * cap, len(la.sums)),
                    lo_b=j * cap,
                    hi_b=min((j + 1) * cap, len(lb.sums)),
                )
                if hit is not None:
                    ia, jb = hit
                    mask = la.masks[ia] | lb.masks[jb] | wd.masks[d_pos]
                    verdict = Verdict.yes(inst, mask, rng_seed=rng_seed)
                    break
                collisions += 1
            a_max = la.sums[min((i + 1) * cap, len(la.sums)) - 1]
            b_min = lb.sums[j * cap]
            machine.unit(1)
            if bit_packing_advance(a_max, b_min, t_prime) == "increment_i":
                i += 1
            else:
                j -= 1
            if budget is not None and machine.charged_cost - start_cost > budget:
                truncated = True
                break
        if verdict is not None or truncated:
            break

    if verdict is None:
        verdict = Verdict.no(rng_seed=rng_seed)
    if report is not None:
        report.update(
            algorithm="bitpack",
            n=n,
            ell=ell,
            mode=machine.model,
            seed=rng_seed,
            verdict="yes" if verdict.answer else "no",
            charged_cost=machine.charged_cost - start_cost,
            wall_ns=time.perf_counter_ns() - t0,
            collisions=collisions,
            descents=descents,
            word_pairs=word_pairs,
            truncated=truncated,
            hash_bits=m,
            d_size=d_size,
        )
    return verdict
