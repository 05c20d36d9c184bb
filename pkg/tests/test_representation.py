"""Residue-filtered representation solvers and their subroutines.

Covers the prime sampler, the two exact preprocessing routines, couple
lists, block selection, packed couple scanning, and both randomized
deciders, each against independent references or exhaustive checks.
"""

import math
import random

import pytest

from logshave._rng import SplitMix64, derive_seed
from logshave.baseline import canonical_partition
from logshave.constants import solve_base_constants
from logshave.core import Instance, dp_bellman
from logshave.enumeration import enumerate_indices, residue_split
from logshave.hashing import default_out_bits, draw_hash, hash_eval
from logshave.representation import (
    RepParams,
    _budgets,
    _catalog_shifts,
    _couple_scan,
    annotate_good_residue,
    packed_representation_ov,
    preprocess_additive,
    preprocess_unbalanced,
    prime_residue_spread,
    rep_c_size,
    representation_ov,
    residue_couple_list,
    sample_packing,
    sample_prime,
    sample_searching,
    select_c,
    select_d,
)
from logshave.wordram import (
    Machine,
    QuarterCatalog,
    WordLayoutError,
    couple_slot_width,
    decode_couple,
    unpack_word,
)

BASE = solve_base_constants()


def is_prime_trial(x: int) -> bool:
    if x < 2:
        return False
    d = 2
    while d * d <= x:
        if x % d == 0:
            return False
        d += 1
    return True


def subset_sums(values) -> list[int]:
    sums = [0]
    for v in values:
        sums += [s + v for s in sums]
    return sums


class TestSamplePrime:
    def test_small_word_interval(self):
        # 16^(1 + 1.1186/2) ~ 75.3, so every draw lies in [76, 150]
        for seed in range(100):
            p = sample_prime(16, 1.1186, SplitMix64(seed))
            assert 75 <= p <= 151
            assert is_prime_trial(p)

    def test_deterministic_per_seed(self):
        a = sample_prime(64, BASE.beta, SplitMix64(42))
        b = sample_prime(64, BASE.beta, SplitMix64(42))
        assert a == b

    def test_thousand_draws_all_prime(self):
        lo = math.ceil(32 ** (1.0 + BASE.beta / 2.0))
        hi = math.floor(2.0 * (32 ** (1.0 + BASE.beta / 2.0)))
        for seed in range(1000):
            p = sample_prime(32, BASE.beta, SplitMix64(seed))
            assert lo <= p <= hi
            assert is_prime_trial(p)

    def test_narrow_word_rejected(self):
        with pytest.raises(ValueError):
            sample_prime(7, BASE.beta, SplitMix64(0))


class TestPrimeResidueSpread:
    def test_modulus_above_range_preserves_all(self):
        assert prime_residue_spread(range(10), 101) == 1.0

    def test_forced_congruence(self):
        p = 97
        assert prime_residue_spread([0, p, 2 * p], p) == pytest.approx(1 / 3)

    def test_random_sets_usually_spread(self):
        # over random value sets and sampler-drawn moduli, at least a
        # quarter of the values stay distinct in at least 70% of trials
        rnd = random.Random(0x5B12EAD)
        good = 0
        for trial in range(200):
            p = sample_prime(64, BASE.beta, SplitMix64(10_000 + trial))
            vals = rnd.sample(range(1, 1 << 40), 10)
            if prime_residue_spread(vals, p) >= 0.25:
                good += 1
        assert good >= 140

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            prime_residue_spread([], 11)


class TestPreprocessAdditive:
    def test_repeated_unit_block_matches_oracle(self):
        # 20 equal values collapse to 21 block sums, far under the
        # sum-poverty gate, so the routine must answer and agree with
        # the exact oracle on yes and no targets alike
        for k, want_yes in ((2, True), (3, True), (4, False)):
            rnd = random.Random(k)
            vals = [1] * 20 + [rnd.randrange(2, 1 << 14) for _ in range(20)]
            rnd.shuffle(vals)
            y_idx = tuple(i for i, v in enumerate(vals) if v == 1)
            if want_yes:
                chosen = rnd.sample(range(40), 17)
                t = sum(vals[i] for i in chosen)
            else:
                t = sum(vals) + 1 - 0  # unreachable target
                t = rnd.randrange(1, sum(vals))
            inst = Instance.make(vals, t, word_len=64)
            v = preprocess_additive(inst, y_idx, BASE.lambda_, Machine(64))
            assert v is not None, "gate must accept a 21-sum block"
            assert v.answer == dp_bellman(inst).answer
            if v.answer:
                assert v.check(inst)

    def test_distinct_powers_declined(self):
        # 8 distinct powers of two give 256 block sums = the full 2^8,
        # violating the sum-poverty gate
        vals = [1 << i for i in range(8)] + [3] * 8
        inst = Instance.make(vals, 100, word_len=64)
        assert preprocess_additive(inst, tuple(range(8)), BASE.lambda_, Machine(64)) is None

    def test_mixed_powers_and_repeats_sweep(self):
        # block of 7 powers plus 3 repeated units: 131 sums out of 1024
        # passes the gate; 50 planted/random instances against the oracle
        rnd = random.Random(0xADD17)
        y_vals = [1 << i for i in range(7)] + [1, 1, 1]
        agreed = 0
        for trial in range(50):
            vals = list(y_vals) + [rnd.randrange(2, 1 << 14) for _ in range(10)]
            if trial % 2 == 0:
                chosen = rnd.sample(range(20), rnd.randrange(4, 16))
                t = sum(vals[i] for i in chosen)
            else:
                t = rnd.randrange(1, sum(vals))
            inst = Instance.make(vals, t, word_len=64)
            v = preprocess_additive(inst, tuple(range(10)), BASE.lambda_, Machine(64))
            assert v is not None
            assert v.answer == dp_bellman(inst).answer
            if v.answer:
                assert v.check(inst)
            agreed += 1
        assert agreed == 50

    def test_refined_variant_matches_oracle(self):
        rnd = random.Random(0x12EF)
        for trial in range(10):
            vals = [1] * 8 + [rnd.randrange(2, 1 << 12) for _ in range(12)]
            rnd.shuffle(vals)
            y_idx = tuple(i for i, v in enumerate(vals) if v == 1)
            if trial % 2 == 0:
                chosen = rnd.sample(range(20), 9)
                t = sum(vals[i] for i in chosen)
            else:
                t = rnd.randrange(1, sum(vals))
            inst = Instance.make(vals, t, word_len=64)
            rep = {}
            v = preprocess_additive(
                inst, y_idx, BASE.lambda_, Machine(64), refined=True,
                rng_seed=trial, report=rep,
            )
            assert v is not None
            assert rep["preprocessing"] == "additive-refined"
            assert v.answer == dp_bellman(inst).answer
            if v.answer:
                assert v.check(inst)


class TestPreprocessUnbalanced:
    def test_solution_disjoint_from_block_found(self):
        # distinct powers make the solution unique, so the witness is
        # pinned down exactly
        vals = [1 << i for i in range(16)]
        y_idx = (12, 13, 14, 15)
        chosen = [0, 2, 5, 7, 9]
        t = sum(vals[i] for i in chosen)
        inst = Instance.make(vals, t, word_len=64)
        v = preprocess_unbalanced(inst, y_idx, BASE.eps1, Machine(64))
        assert v is not None and v.answer
        assert v.witness.subset_mask == sum(1 << i for i in chosen)

    def test_balanced_solution_declined(self):
        # the unique solution meets the block in exactly half its
        # elements on both orientations, outside the covered band
        vals = [1 << i for i in range(16)]
        y_idx = tuple(range(8, 16))
        chosen = [8, 9, 10, 11, 0, 1, 2, 3]
        t = sum(vals[i] for i in chosen)
        inst = Instance.make(vals, t, word_len=64)
        assert preprocess_unbalanced(inst, y_idx, BASE.eps1, Machine(64)) is None

    def test_planted_unbalanced_sweep(self):
        # any plant with block intersection below the band edge (3 of 8
        # here) is inside the exact coverage and must be found
        rnd = random.Random(0xBA7A)
        y_idx = tuple(range(16, 24))
        for trial in range(100):
            vals = [rnd.randrange(1, 1 << 18) for _ in range(24)]
            k = rnd.randrange(0, 4)
            chosen = rnd.sample(y_idx, k) + rnd.sample(range(16), 8 - k)
            t = sum(vals[i] for i in chosen)
            inst = Instance.make(vals, t, word_len=64)
            v = preprocess_unbalanced(inst, y_idx, BASE.eps1, Machine(64))
            assert v is not None and v.answer
            assert v.check(inst)


class TestResidueCoupleList:
    def test_missing_residue_gives_empty_list(self):
        m = Machine(64)
        la = enumerate_indices([1, 2], (0, 1), machine=m)
        split = residue_split(la, 11, m)
        cat = QuarterCatalog(4, 0)
        entries, created = residue_couple_list(split, [0], 7, 11, m)
        assert entries == [] and created == 0

    def test_zero_shift_reproduces_sublist(self):
        m = Machine(64)
        vals = [3, 5, 8, 21, 34]
        la = enumerate_indices(vals, tuple(range(5)), machine=m)
        split = residue_split(la, 11, m)
        for r, sub in split.sublists.items():
            entries, created = residue_couple_list(split, [0], r, 11, m)
            assert created == len(sub.sums)
            assert [s for s, _ in entries] == list(sub.sums)
            assert all(bits == 0b1 for _, bits in entries)

    def test_total_couple_count_identity(self):
        # summed over all residues, every (element, quarterset) pair is
        # created exactly once
        rnd = random.Random(0xC0DE)
        vals = [rnd.randrange(1, 1 << 16) for _ in range(10)]
        c_vals = [rnd.randrange(1, 1 << 16) for _ in range(4)]
        m = Machine(64)
        la = enumerate_indices(vals, tuple(range(10)), machine=m)
        p = 11
        split = residue_split(la, p, m)
        cat = QuarterCatalog(4, 1)
        shifts = _catalog_shifts(c_vals, (0, 1, 2, 3), cat)
        total = 0
        for r in range(p):
            entries, created = residue_couple_list(split, shifts, r, p, m)
            total += created
            for s, _bits in entries:
                assert s % p == r
        assert total == len(la.sums) * len(cat.masks)


class TestSelectC:
    def test_consecutive_integers_double_three_times(self):
        vals = list(range(1, 101))
        c = select_c(vals, 101, 3)
        assert len(c) == 3
        sums = subset_sums([vals[i] for i in c])
        assert len({s % 101 for s in sums}) == 8

    def test_empty_block(self):
        assert select_c([5, 6], 11, 0) == ()

    def test_single_residue_class_gets_stuck(self):
        vals = [5, 16, 27, 38]  # all congruent mod 11
        with pytest.raises(ValueError, match="greedy doubling stuck"):
            select_c(vals, 11, 2)

    def test_doubling_invariant_on_random_values(self):
        rnd = random.Random(0x5E1C)
        for trial in range(20):
            vals = rnd.sample(range(1, 1 << 20), 30)
            c = select_c(vals, 101, 4)
            sums = subset_sums([vals[i] for i in c])
            assert len({s % 101 for s in sums}) == 16


class TestSelectD:
    def test_congruent_values_collapse_residues(self):
        p = 97
        vals = [5 + k * p for k in range(12)]
        d = select_d(vals, p, 5)
        assert len(d) == 5
        sums = subset_sums([vals[i] for i in d])
        assert len({s % p for s in sums}) <= 6  # one residue per subset size

    def test_random_values_meet_progression_bound(self):
        rnd = random.Random(0xD5E1)
        for trial in range(20):
            p = sample_prime(64, BASE.beta, SplitMix64(trial))
            vals = [rnd.randrange(1, 1 << 30) for _ in range(24)]
            target = 6
            d = select_d(vals, p, target)
            assert len(d) == target
            q = max(1, len(vals) // target)
            sums = subset_sums([vals[i] for i in d])
            assert len({s % p for s in sums}) <= (p / q) * target * target

    def test_singleton_block(self):
        d = select_d([10, 7], 11, 1)
        assert len(d) == 1
        v = [10, 7][d[0]]
        assert len({0 % 11, v % 11}) == 2

    def test_size_out_of_range(self):
        with pytest.raises(ValueError):
            select_d([1, 2, 3], 11, 0)
        with pytest.raises(ValueError):
            select_d([1, 2, 3], 11, 4)


class TestSamplePacking:
    def _setup(self, seed=0):
        cat = QuarterCatalog(4, 1)
        h = draw_hash(64, default_out_bits(64), SplitMix64(seed))
        return cat, h

    def test_single_entry(self):
        cat, h = self._setup()
        m = Machine(64)
        out = sample_packing([(5, 0b1)], h, cat, m)
        assert len(out) == 1
        assert out[0].low_sum == 5 and out[0].high_sum == 5
        assert out[0].packed.count == 1

    def test_empty_list(self):
        cat, h = self._setup()
        assert sample_packing([], h, cat, Machine(64)) == []

    def test_round_trip_thousand_entries(self):
        # boundary sums + slot order + decoded couples reproduce the
        # input list exactly, each entry packed exactly once
        cat, h = self._setup(9)
        m = Machine(64)
        rnd = random.Random(0x407)
        sums = sorted(rnd.sample(range(1, 1 << 40), 1000))
        entries = [(s, rnd.randrange(1, 1 << len(cat))) for s in sums]
        triples = sample_packing(entries, h, cat, m)
        width = couple_slot_width(h.out_bits, cat)
        cap = m.capacity(width)
        dom = (1 << 64) - 1
        pos = 0
        for tri in triples:
            chunk = entries[pos : pos + cap]
            assert tri.low_sum == chunk[0][0]
            assert tri.high_sum == chunk[-1][0]
            slots = unpack_word(tri.packed)
            assert len(slots) == len(chunk)
            for slot, (s, bits) in zip(slots, chunk):
                hv, cb = decode_couple(slot, h.out_bits, cat)
                assert cb == bits
                assert hv == hash_eval(h, s & dom, Machine(64))
            pos += len(chunk)
        assert pos == len(entries)

    def test_oversized_couple_rejected(self):
        # 56 catalogued quartersets + an 18-bit hash need 74 bits per
        # couple, more than the 64-bit word
        cat = QuarterCatalog(10, 2)
        h = draw_hash(64, 18, SplitMix64(1))
        assert couple_slot_width(h.out_bits, cat) > 64
        with pytest.raises(WordLayoutError):
            sample_packing([(1, 0b1)], h, cat, Machine(64))


class TestSampleSearching:
    def _packed(self, entries, h, cat, m):
        return sample_packing(entries, h, cat, m)

    def test_planted_disjoint_pair_found(self):
        cat = QuarterCatalog(4, 1)
        h = draw_hash(64, default_out_bits(64), SplitMix64(3))
        m = Machine(64)
        ea = [(100, 0b10)]  # quarterset {0}
        eb = [(200, 0b100)]  # quarterset {1}
        got = sample_searching(
            300, ea, eb, self._packed(ea, h, cat, m), self._packed(eb, h, cat, m),
            h=h, catalog=cat, machine=m,
        )
        assert got == (100, 1, 200, 2)

    def test_overlapping_quartersets_rejected(self):
        cat = QuarterCatalog(4, 1)
        h = draw_hash(64, default_out_bits(64), SplitMix64(3))
        m = Machine(64)
        ea = [(100, 0b10)]
        eb = [(200, 0b10)]  # same quarterset: sums match, blocks overlap
        got = sample_searching(
            300, ea, eb, self._packed(ea, h, cat, m), self._packed(eb, h, cat, m),
            h=h, catalog=cat, machine=m,
        )
        assert got is None

    def test_empty_lists(self):
        cat = QuarterCatalog(4, 1)
        h = draw_hash(64, default_out_bits(64), SplitMix64(3))
        m = Machine(64)
        ea = [(100, 0b10)]
        packed = self._packed(ea, h, cat, m)
        assert sample_searching(5, [], ea, [], packed, h=h, catalog=cat, machine=m) is None
        assert sample_searching(5, ea, [], packed, [], h=h, catalog=cat, machine=m) is None

    def test_never_misses_reference_scan(self):
        # on random couple lists under 20 hash draws each, the packed
        # walk finds a pair exactly when the exact scan does, and every
        # returned pair is genuine
        cat = QuarterCatalog(4, 1)
        nbits = len(cat)
        rnd = random.Random(0x5EED)
        stats_any = {"descents": 0, "collisions": 0}
        for trial in range(100):
            na, nb = rnd.randrange(5, 40), rnd.randrange(5, 40)
            sa = sorted(rnd.sample(range(1, 1 << 30), na))
            sb = sorted(rnd.sample(range(1, 1 << 30), nb))
            ea = [(s, rnd.randrange(1, 1 << nbits)) for s in sa]
            eb = [(s, rnd.randrange(1, 1 << nbits)) for s in sb]
            if trial % 2 == 0:
                t2 = ea[rnd.randrange(na)][0] + eb[rnd.randrange(nb)][0]
            else:
                t2 = rnd.randrange(1, 1 << 31)
            ref = _couple_scan(ea, eb, t2, cat, Machine(64))
            for hs in range(20):
                h = draw_hash(64, default_out_bits(64), SplitMix64(900_000 + trial * 20 + hs))
                m = Machine(64)
                ha = sample_packing(ea, h, cat, m)
                hb = sample_packing(eb, h, cat, m)
                stats = {}
                got = sample_searching(
                    t2, ea, eb, ha, hb, h=h, catalog=cat, machine=m, stats=stats,
                )
                if ref is not None:
                    assert got is not None
                if got is not None:
                    ap, qi, bp, qj = got
                    assert ap + bp == t2
                    assert not (cat.masks[qi] & cat.masks[qj])
                    assert ref is not None
                    assert stats.get("descents", 0) >= 1
                for k in stats_any:
                    stats_any[k] += stats.get(k, 0)
        assert stats_any["descents"] > 0


class TestQuartersetCovering:
    def test_admissible_splits_are_catalogued(self):
        # for every core intersection of at most half the block, every
        # partition into two disjoint quartersets within the size bound
        # uses only catalogued masks (exhaustive to block size 12)
        for c in range(4, 13):
            q_max = math.floor((1.0 + BASE.eps2) * c / 4.0)
            cat = QuarterCatalog(c, q_max)
            catalogued = set(cat.masks)
            for sc in range(1 << c):
                if bin(sc).count("1") > c // 2:
                    continue
                q1 = sc
                while True:
                    q2 = sc ^ q1
                    if bin(q1).count("1") <= q_max and bin(q2).count("1") <= q_max:
                        assert q1 in catalogued and q2 in catalogued
                    if q1 == 0:
                        break
                    q1 = (q1 - 1) & sc

    def test_realized_block_sizes_cover_the_middle_band(self):
        # at the word lengths the suites run, the solver's own block
        # sizes are 4 or 5, where every intersection of at most half the
        # block admits at least one in-bound split (the floor on the
        # quarterset bound first opens a gap at block size 6, which no
        # suite word length realizes)
        realized = {rep_c_size(ell, BASE.beta) for ell in (16, 32, 64, 128, 256)}
        assert realized <= {4, 5}
        for c in sorted(realized):
            q_max = math.floor((1.0 + BASE.eps2) * c / 4.0)
            for size in range(c // 2 + 1):
                need = math.ceil(size / 2)
                assert need <= q_max, (c, size)


def _no_instances(count=500, seed=0x90):
    out = []
    k = 0
    rnd = random.Random(seed)
    while len(out) < count:
        k += 1
        n = rnd.randrange(14, 19)
        vals = [rnd.randrange(1, 1 << 22) for _ in range(n)]
        t = rnd.randrange(1, sum(vals))
        inst = Instance.make(vals, t, word_len=64)
        if not dp_bellman(inst).answer:
            out.append(inst)
        assert k < 20 * count, "dense draws should be overwhelmingly no"
    return out


@pytest.fixture(scope="module")
def no_instances():
    return _no_instances()


class TestRepresentationOv:
    def test_never_yes_on_no_instances(self, no_instances):
        # one-sided error: a thousand instance-seed pairs, zero yes
        for k, inst in enumerate(no_instances):
            for seed in (2 * k, 2 * k + 1):
                assert not representation_ov(inst, rng_seed=seed).answer

    def test_planted_instances_mostly_found(self):
        rnd = random.Random(0xA11CE)
        found = 0
        for k in range(15):
            vals = [rnd.randrange(1, 1 << 20) for _ in range(20)]
            chosen = rnd.sample(range(20), 10)
            t = sum(vals[i] for i in chosen)
            inst = Instance.make(vals, t, word_len=64)
            for seed in (1, 2):
                v = representation_ov(inst, rng_seed=seed, machine=Machine(64))
                if v.answer:
                    assert v.check(inst)
                    found += 1
        assert found >= 27

    def test_report_fields(self):
        rnd = random.Random(0x9E9)
        vals = [rnd.randrange(1, 1 << 20) for _ in range(18)]
        chosen = rnd.sample(range(18), 9)
        inst = Instance.make(vals, sum(vals[i] for i in chosen), word_len=64)
        rep = {}
        v = representation_ov(inst, rng_seed=5, machine=Machine(64), report=rep)
        for key in (
            "algorithm", "n", "ell", "mode", "seed", "verdict", "charged_cost",
            "wall_ns", "constants", "c_size", "case", "p", "s_used",
            "couples_created", "c_idx", "d_idx", "a_idx", "b_idx", "q_max",
            "collisions", "descents",
        ):
            assert key in rep, key
        assert rep["algorithm"] == "repov"
        assert rep["verdict"] == ("yes" if v.answer else "no")
        assert rep["charged_cost"] > 0
        assert rep["n"] == 18 and rep["ell"] == 64

    def test_couple_budget_bound(self):
        # all-even values with an odd target: no solution on either
        # orientation, so sampling runs to its budgets; the couples
        # created never exceed the cutoff plus one batch per orientation
        vals = [2 << i for i in range(18)]
        inst = Instance.make(vals, 3, word_len=64)
        rep = {}
        v = representation_ov(inst, rng_seed=2, machine=Machine(64), report=rep)
        assert not v.answer
        assert rep["s_used"] > 0
        c_size = rep_c_size(64, BASE.beta)
        part = canonical_partition(18, c_size=c_size)
        q_masks = len(QuarterCatalog(c_size, rep["q_max"]).masks)
        batch_max = ((1 << len(part.a_idx)) + (1 << len(part.b_idx))) * q_masks
        _, k_cutoff = _budgets(18, 64, BASE.eps1, BASE.beta, BASE.lambda_, 4.0, 4.0)
        assert rep["couples_created"] <= 2 * (k_cutoff + batch_max)

    def test_tiny_couple_cutoff_binds(self):
        # shrinking the cutoff multiplier to its floor makes the couple
        # budget stop sampling long before the sample budget would
        vals = [2 << i for i in range(18)]
        inst = Instance.make(vals, 3, word_len=64)
        s_budget, k_cutoff = _budgets(
            18, 64, BASE.eps1, BASE.beta, BASE.lambda_, 4.0, 0.001
        )
        assert k_cutoff == 64
        rep = {}
        v = representation_ov(
            inst, rng_seed=2, machine=Machine(64), c_k=0.001, report=rep
        )
        assert not v.answer
        assert 0 < rep["s_used"] < 2 * s_budget
        c_size = rep_c_size(64, BASE.beta)
        part = canonical_partition(18, c_size=c_size)
        q_masks = len(QuarterCatalog(c_size, rep["q_max"]).masks)
        batch_max = ((1 << len(part.a_idx)) + (1 << len(part.b_idx))) * q_masks
        assert rep["couples_created"] <= 2 * (64 + batch_max)

    def test_tiny_instance_falls_back_exactly(self):
        inst = Instance.make([3, 5, 8, 11, 9], 17, word_len=64)
        rep = {}
        v = representation_ov(inst, rng_seed=1, machine=Machine(64), report=rep)
        assert rep["case"] == "fallback"
        assert v.answer == dp_bellman(inst).answer

    def test_same_seed_same_outcome(self):
        rnd = random.Random(0xDE7)
        vals = [rnd.randrange(1, 1 << 20) for _ in range(18)]
        chosen = rnd.sample(range(18), 9)
        inst = Instance.make(vals, sum(vals[i] for i in chosen), word_len=64)
        rep1, rep2 = {}, {}
        v1 = representation_ov(inst, rng_seed=7, machine=Machine(64), report=rep1)
        v2 = representation_ov(inst, rng_seed=7, machine=Machine(64), report=rep2)
        assert v1.answer == v2.answer
        assert rep1["s_used"] == rep2["s_used"]
        if v1.answer:
            assert v1.witness.subset_mask == v2.witness.subset_mask


def _congruent_block_instance(seed, in_core, rnd):
    """White-box build replaying the solver's own randomness.

    Same-residue values force the congruent-block route; the solver's
    core indices are recovered by replaying its prime draw and pool
    picks, and distinct power multipliers pin down a unique planted
    solution with a chosen core intersection size.
    """
    rng = SplitMix64(derive_seed(seed, "packedrepov"))
    p = sample_prime(64, BASE.beta, rng)
    r = 1 + rnd.randrange(p - 1)
    n = 16
    pool = list(range(6, 16))
    picked = []
    for _ in range(rep_c_size(64, BASE.beta)):
        picked.append(pool.pop(rng.next_below(len(pool))))
    c_idx = tuple(sorted(picked))
    vals = [r + (1 << i) * p for i in range(n)]
    chosen = set(rnd.sample(c_idx, in_core))
    others = [i for i in range(n) if i not in set(c_idx)]
    chosen |= set(rnd.sample(others, 8 - in_core))
    t = sum(vals[i] for i in chosen)
    inst = Instance.make(vals, t, word_len=64)
    return inst, chosen, c_idx, p


class TestPackedRepresentationOv:
    def test_congruent_route_sampling_path(self):
        # plants meeting the core in exactly 2 of 4 elements sit outside
        # both preprocessing bands on both orientations, so every run
        # must take the sampling path; the unique witness is found on
        # all 20 seeds
        rnd = random.Random(3)
        for k in range(20):
            seed = 4000 + k
            inst, chosen, c_idx, p = _congruent_block_instance(seed, 2, rnd)
            threshold = inst.n / math.log2(64)
            assert len({v % p for v in inst.values}) <= threshold
            rep = {}
            v = packed_representation_ov(
                inst, rng_seed=seed, machine=Machine(64), report=rep
            )
            assert rep["case"] == "II"
            assert rep["c_idx"] == c_idx
            assert rep["s_used"] > 0, "preprocessing must not cover this plant"
            assert v.answer
            assert v.witness.subset_mask == sum(1 << i for i in chosen)

    def test_spread_values_fall_back_at_small_sizes(self):
        # spread-out values pass the residue-count threshold for the
        # doubling route, but at this size its block target is below the
        # minimum, so the solver delegates to the exact fallback
        rnd = random.Random(0x5FA11)
        for k in range(5):
            seed = 6000 + k
            rng = SplitMix64(derive_seed(seed, "packedrepov"))
            p = sample_prime(64, BASE.beta, rng)
            n = 16
            vals = rnd.sample(range(1, 1 << 20), n)
            threshold = n / math.log2(64)
            assert len({v % p for v in vals}) > threshold
            assert math.floor(0.5 * math.log2(threshold)) < 4
            chosen = rnd.sample(range(n), 8)
            t = sum(vals[i] for i in chosen)
            inst = Instance.make(vals, t, word_len=64)
            rep = {}
            v = packed_representation_ov(
                inst, rng_seed=seed, machine=Machine(64), report=rep
            )
            assert rep["case"] == "fallback"
            assert v.answer == dp_bellman(inst).answer

    def test_never_yes_on_no_instances(self, no_instances):
        for k, inst in enumerate(no_instances):
            for seed in (2 * k, 2 * k + 1):
                assert not packed_representation_ov(inst, rng_seed=seed).answer

    def test_report_fields(self):
        rnd = random.Random(3)
        inst, chosen, _c, _p = _congruent_block_instance(4000, 2, rnd)
        rep = {}
        v = packed_representation_ov(inst, rng_seed=4000, machine=Machine(64), report=rep)
        for key in (
            "algorithm", "n", "ell", "mode", "seed", "verdict", "charged_cost",
            "wall_ns", "constants", "case", "p", "s_used", "couples_created",
            "c_idx", "d_idx", "a_idx", "b_idx", "q_max", "c_size", "d_size",
            "sampled_residues", "collisions", "descents",
        ):
            assert key in rep, key
        assert rep["algorithm"] == "packedrepov"
        assert rep["verdict"] == ("yes" if v.answer else "no")
        assert rep["d_size"] == 6 and rep["c_size"] == 4
        assert len(rep["sampled_residues"]) == rep["s_used"]

    def test_same_seed_same_outcome(self):
        rnd1 = random.Random(3)
        rnd2 = random.Random(3)
        inst1, _, _, _ = _congruent_block_instance(4000, 2, rnd1)
        inst2, _, _, _ = _congruent_block_instance(4000, 2, rnd2)
        rep1, rep2 = {}, {}
        v1 = packed_representation_ov(inst1, rng_seed=4000, machine=Machine(64), report=rep1)
        v2 = packed_representation_ov(inst2, rng_seed=4000, machine=Machine(64), report=rep2)
        assert v1.answer == v2.answer
        assert rep1["s_used"] == rep2["s_used"]
        if v1.answer:
            assert v1.witness.subset_mask == v2.witness.subset_mask


class TestAnnotateGoodResidue:
    def test_sampled_win_marks_a_good_residue(self):
        rnd = random.Random(3)
        inst, chosen, _c, _p = _congruent_block_instance(4000, 2, rnd)
        rep = {}
        v = packed_representation_ov(inst, rng_seed=4000, machine=Machine(64), report=rep)
        assert v.answer and rep["s_used"] > 0
        plant = sum(1 << i for i in chosen)
        assert annotate_good_residue(rep, inst, plant) is True
        assert rep["good_residue_hit"] is True

    def test_preprocessed_run_reports_false(self):
        # a plant disjoint from the core is resolved by preprocessing;
        # no residues were sampled, so none can be good
        rnd = random.Random(12)
        inst, chosen, _c, _p = _congruent_block_instance(4100, 0, rnd)
        rep = {}
        v = packed_representation_ov(inst, rng_seed=4100, machine=Machine(64), report=rep)
        assert v.answer and rep["s_used"] == 0
        assert rep.get("preprocessing") == "unbalanced"
        plant = sum(1 << i for i in chosen)
        assert annotate_good_residue(rep, inst, plant) is False
        assert rep["good_residue_hit"] is False

    def test_invalid_planted_mask_rejected(self):
        rnd = random.Random(3)
        inst, chosen, _c, _p = _congruent_block_instance(4000, 2, rnd)
        rep = {}
        packed_representation_ov(inst, rng_seed=4000, machine=Machine(64), report=rep)
        plant = sum(1 << i for i in chosen)
        with pytest.raises(AssertionError):
            annotate_good_residue(rep, inst, plant ^ 1)


class TestRepParams:
    def test_fields_and_defaults(self):
        params = RepParams(p=101, c_size=4, d_size=6, e1=BASE.eps1,
                           e2=BASE.eps2, s_budget=8192, k_cutoff=200_000)
        assert params.c_s == 4.0 and params.c_k == 4.0
        assert params.case == "base"
