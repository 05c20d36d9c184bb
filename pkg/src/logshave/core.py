"""Problem instances, exact oracles, and the search-to-decision wrapper.

Everything else in the library is measured against this module: the
brute-force and dynamic-programming deciders are the ground truth each
solver must agree with, and the search wrapper turns any decision
procedure into a witness-producing one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ._rng import derive_seed

__all__ = [
    "Instance",
    "Solution",
    "Verdict",
    "SizeCapError",
    "default_word_len",
    "brute_force",
    "dp_bellman",
    "decide_to_search",
    "instance_to_text",
    "instance_from_text",
]

BRUTE_FORCE_CAP = 24
DP_TARGET_CAP = 1 << 26
# decision targets at or below 2^(0.499 n) are in easy dynamic-programming
# territory; the CLI auto-routes them.
DP_AUTO_EXPONENT = 0.499


class SizeCapError(ValueError):
    """An oracle was asked to exceed its configured size cap."""


def default_word_len(n: int, target: int) -> int:
    """Smallest power of two >= max(n, bit-length(target), 64)."""
    need = max(n, target.bit_length(), 64)
    width = 1
    while width < need:
        width <<= 1
    return width


@dataclass(frozen=True)
class Instance:
    """A subset-sum instance: positive values, target, simulated width."""

    values: tuple[int, ...]
    target: int
    word_len: int

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("instance needs at least one value")
        if self.target < 1:
            raise ValueError("target must be positive")
        top = 0
        for v in self.values:
            if v < 1:
                raise ValueError("values must be positive")
            if v > top:
                top = v
        # Values above the target are allowed but inert: with all values
        # positive, no subset containing one can sum to the target, so
        # every decision procedure ignores them automatically.
        if (
            self.word_len < self.target.bit_length()
            or self.word_len < top.bit_length()
            or self.word_len < len(self.values)
        ):
            raise ValueError("word_len must cover the target, every value, and the size")

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def make(
        cls, values, target: int, word_len: int | None = None
    ) -> "Instance":
        vals = tuple(int(v) for v in values)
        if word_len is None:
            top = max(vals) if vals else 0
            word_len = default_word_len(len(vals), max(int(target), top))
        return cls(values=vals, target=int(target), word_len=word_len)

    def mask_sum(self, mask: int) -> int:
        total = 0
        for i, v in enumerate(self.values):
            if (mask >> i) & 1:
                total += v
        return total


@dataclass(frozen=True)
class Solution:
    """A subset selection, as a bitmask over the instance's value list."""

    subset_mask: int


@dataclass(frozen=True)
class Verdict:
    """Outcome of one decision/search run.

    A yes answer always carries a witness; constructors below enforce
    the no-false-positive contract by checking the witness sum.
    """

    answer: bool
    witness: Solution | None = None
    trials_used: int = 1
    rng_seed: int = 0

    @staticmethod
    def yes(inst: Instance, mask: int, trials_used: int = 1, rng_seed: int = 0) -> "Verdict":
        if inst.mask_sum(mask) != inst.target:
            raise AssertionError("refusing to emit a yes verdict with an invalid witness")
        return Verdict(
            answer=True,
            witness=Solution(subset_mask=mask),
            trials_used=trials_used,
            rng_seed=rng_seed,
        )

    @staticmethod
    def no(trials_used: int = 1, rng_seed: int = 0) -> "Verdict":
        return Verdict(answer=False, witness=None, trials_used=trials_used, rng_seed=rng_seed)

    def check(self, inst: Instance) -> bool:
        if not self.answer:
            return self.witness is None
        return (
            self.witness is not None
            and inst.mask_sum(self.witness.subset_mask) == inst.target
        )


def brute_force(inst: Instance, cap: int = BRUTE_FORCE_CAP) -> Verdict:
    """Exhaustive scan of all subsets via a reflected-code walk.

    Each step flips one element in or out, so the running sum is updated
    in constant time.  Deterministic; the reference oracle for every
    statistical suite.
    """
    n = inst.n
    if n > cap:
        raise SizeCapError(f"brute force refuses n={n} > cap={cap}")
    from ._backend import kernels

    hit = kernels.brute_force_scan(inst.values, inst.target)
    if hit is None:
        return Verdict.no()
    return Verdict.yes(inst, hit)


def dp_bellman(inst: Instance, cap: int = DP_TARGET_CAP) -> Verdict:
    """Reachability table over sums 0..t as one big bitset per prefix.

    Row i records which sums the first i values can reach; the final bit
    at t decides, and back-tracking over rows reconstructs a witness.
    Rows are checkpointed sparsely when the full table would be large.
    """
    t = inst.target
    if t > cap:
        raise SizeCapError(f"dynamic program refuses t={t} > cap={cap}")
    n = inst.n
    lim = (1 << (t + 1)) - 1
    total_bits = (n + 1) * (t + 1)
    stride = 1 if total_bits <= (1 << 31) else 8

    def advance(row: int, value: int) -> int:
        return (row | (row << value)) & lim

    checkpoints: dict[int, int] = {0: 1}
    row = 1
    for i, v in enumerate(inst.values, start=1):
        row = advance(row, v)
        if i % stride == 0 or i == n:
            checkpoints[i] = row
    if not ((row >> t) & 1):
        return Verdict.no()

    def row_at(i: int) -> int:
        base = i - (i % stride) if i % stride else i
        while base not in checkpoints:
            base -= 1
        r = checkpoints[base]
        for k in range(base + 1, i + 1):
            r = advance(r, inst.values[k - 1])
        return r

    mask = 0
    cur = t
    for i in range(n, 0, -1):
        prev = row_at(i - 1)
        if (prev >> cur) & 1:
            continue
        mask |= 1 << (i - 1)
        cur -= inst.values[i - 1]
    if cur != 0:
        raise AssertionError("reconstruction must land on zero")
    return Verdict.yes(inst, mask)


def decide_to_search(
    decider: Callable[[Instance, int], Verdict],
    inst: Instance,
    rng_seed: int = 0,
) -> Verdict:
    """Turn a decision procedure into a witness-producing search.

    Values are committed one at a time: stage i re-decides an
    (n-i+1)-value subinstance, and for randomized one-sided deciders the
    i-th stage is repeated i times (a yes is always trustworthy, so only
    misses need amplification).  If the decider's misses derail the
    reconstruction the wrapper returns no rather than guess.
    """
    n = inst.n
    trials = 0

    def decide(values_idx: list[int], t_cur: int, stage: int) -> bool:
        nonlocal trials
        usable = [i for i in values_idx if inst.values[i] <= t_cur]
        if t_cur == 0:
            return True
        if not usable:
            return False
        sub = Instance(
            values=tuple(inst.values[i] for i in usable),
            target=t_cur,
            word_len=inst.word_len,
        )
        repeats = max(1, stage)
        for rep in range(repeats):
            trials += 1
            sub_seed = derive_seed(rng_seed, "search", stage, rep, t_cur)
            if decider(sub, sub_seed).answer:
                return True
        return False

    remaining = list(range(n))
    if not decide(remaining, inst.target, 1):
        return Verdict.no(trials_used=trials, rng_seed=rng_seed)
    mask = 0
    t_cur = inst.target
    for stage_offset, idx in enumerate(list(remaining)):
        if t_cur == 0:
            break
        remaining.remove(idx)
        v = inst.values[idx]
        stage = 2 + stage_offset
        if v <= t_cur and not decide(remaining, t_cur, stage):
            # idx must be part of the solution being tracked
            mask |= 1 << idx
            t_cur -= v
    if t_cur != 0:
        return Verdict.no(trials_used=trials, rng_seed=rng_seed)
    return Verdict.yes(inst, mask, trials_used=trials, rng_seed=rng_seed)


def instance_to_text(inst: Instance, planted_mask: int | None = None) -> str:
    """Serialize: "n t" line, values line, optional planted-mask comment."""
    lines = [
        f"{inst.n} {inst.target}",
        " ".join(str(v) for v in inst.values),
    ]
    if planted_mask is not None:
        lines.append(f"# mask={planted_mask:x}")
    return "\n".join(lines) + "\n"


def instance_from_text(
    text: str, word_len: int | None = None
) -> tuple[Instance, int | None]:
    """Parse the text format; returns (instance, planted mask or None)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ValueError("instance text needs a header line and a values line")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError("header must be 'n t'")
    n, t = int(header[0]), int(header[1])
    values = tuple(int(tok) for tok in lines[1].split())
    if len(values) != n:
        raise ValueError(f"header announces {n} values, line has {len(values)}")
    planted: int | None = None
    for extra in lines[2:]:
        stripped = extra.strip()
        if stripped.startswith("# mask="):
            planted = int(stripped.removeprefix("# mask="), 16)
        else:
            raise ValueError(f"unrecognized trailer line: {extra!r}")
    inst = Instance.make(values, t, word_len=word_len)
    return inst, planted
