"""Simulated machine, packed words, word predicates, and memo tables."""
from __future__ import annotations

import random

import pytest

from logshave.wordram import (
    MEMO_CAP_BITS,
    Machine,
    MemoTable,
    PackedWord,
    QuarterCatalog,
    WordLayoutError,
    build_memo,
    ceil_log2,
    couple_slot_width,
    decode_couple,
    encode_couple,
    hash_ov_word,
    ov_word,
    pack_values,
    packed_hash_compare,
    unpack_word,
)

# ---------------------------------------------------------------------------
# Independent nested-loop references.  These deliberately recompute the
# predicates from their definitions, not by calling library internals.


def ref_hash_compare(slots_a, slots_b, ht, m):
    mod = 1 << m
    wanted = {ht % mod, (ht - 1) % mod}
    return any((a + b) % mod in wanted for a in slots_a for b in slots_b)


def ref_ov(slots_u, slots_v):
    return any(x & y == 0 for x in slots_u for y in slots_v)


def ref_hash_ov(slots_u, slots_v, ht, hash_bits, catalog):
    mod = 1 << hash_bits
    wanted = {ht % mod, (ht - 1) % mod}
    width = len(catalog)
    cmask = (1 << width) - 1
    for su in slots_u:
        ha, bits_a = su >> width, su & cmask
        for sv in slots_v:
            hb, bits_b = sv >> width, sv & cmask
            if (ha + hb) % mod not in wanted:
                continue
            subsets_a = [catalog.masks[k] for k in range(width) if (bits_a >> k) & 1]
            subsets_b = [catalog.masks[k] for k in range(width) if (bits_b >> k) & 1]
            if any(qa & qb == 0 for qa in subsets_a for qb in subsets_b):
                return True
    return False


def one_word(slots, slot_width, word_len=64):
    [pw] = pack_values(list(slots), slot_width, word_len)
    return pw


class TestMachine:
    def test_validation(self):
        with pytest.raises(ValueError):
            Machine(0)
        with pytest.raises(ValueError):
            Machine(64, model="quantum")

    def test_cost_formula_circuit(self):
        m = Machine(256, model="circuit")
        m.unit(3)
        m.mul(2)
        m.mem(1)
        m.ac0_ops += 5
        assert m.mul_cost == ceil_log2(256) == 8
        assert m.ac0_cost == 1
        assert m.charged_cost == 3 + 1 + 5 + 2 * 8

    def test_cost_formula_word(self):
        m = Machine(256, model="word")
        m.unit(3)
        m.mul(2)
        assert m.mul_cost == 1
        assert m.charged_cost == 3 + 2

    def test_predicates_never_charge_ac0_in_word_model(self):
        m = Machine(64, model="word")
        wa = one_word((5,), 3)
        wb = one_word((2,), 3)
        packed_hash_compare(m, wa, wb, 7)
        assert m.ac0_ops == 0
        assert m.unit_ops >= 1  # realized as a slot loop (no memo registered)

    def test_memoized_predicate_charges_one_lookup(self):
        m = Machine(64, model="word")
        table = build_memo(lambda i, j: False, 0)
        m.register_memo(("phc", 3, 64), table)
        base_mem = m.mem_ops
        packed_hash_compare(m, one_word((5,), 3), one_word((2,), 3), 7)
        assert m.mem_ops == base_mem + 1
        assert m.unit_ops == 0 and m.ac0_ops == 0

    def test_register_memo_charges_build_cost(self):
        m = Machine(64, model="word")
        table = build_memo(lambda i, j: i == j, 8)
        m.register_memo(("k",), table)
        assert m.mem_ops == table.build_cost == 256

    def test_cost_additivity(self):
        def seq_a(m):
            m.unit(4)
            packed_hash_compare(m, one_word((1, 2), 4), one_word((3,), 4), 5)

        def seq_b(m):
            m.mul(3)
            ov_word(m, one_word((0b11,), 2, 64), one_word((0b01,), 2, 64))

        for model in ("circuit", "word"):
            ma = Machine(64, model)
            seq_a(ma)
            mb = Machine(64, model)
            seq_b(mb)
            mc = Machine(64, model)
            seq_a(mc)
            seq_b(mc)
            assert mc.charged_cost == ma.charged_cost + mb.charged_cost

    def test_capacity(self):
        m = Machine(64)
        assert m.capacity(16) == 4
        assert m.capacity(100) == 1  # at least one slot always fits
        with pytest.raises(ValueError):
            m.capacity(0)

    def test_counters_dict(self):
        m = Machine(128)
        m.unit(2)
        c = m.counters()
        assert c["unit_ops"] == 2 and c["charged_cost"] == m.charged_cost


class TestPacking:
    def test_round_trip_identity(self, rnd):
        for _ in range(100):
            m_bits = rnd.choice((3, 5, 8))
            word_len = rnd.choice((32, 64, 128))
            n = rnd.randint(0, 30)
            vals = sorted(rnd.randrange(1 << m_bits) for _ in range(n))
            words = pack_values(vals, m_bits, word_len)
            back = [v for w in words for v in unpack_word(w)]
            assert back == vals

    def test_big_endian_layout(self):
        [w] = pack_values([1, 2], 3, 64)
        assert w.word == (1 << 61) | (2 << 58)

    def test_word_order_respects_leading_slots(self, rnd):
        # full words packed from sorted lists compare like their slot tuples
        for _ in range(200):
            a = sorted(rnd.randrange(16) for _ in range(4))
            b = sorted(rnd.randrange(16) for _ in range(4))
            [wa] = pack_values(a, 4, 16)
            [wb] = pack_values(b, 4, 16)
            assert (wa.word < wb.word) == (tuple(a) < tuple(b))

    def test_partial_final_word(self):
        words = pack_values([1, 2, 3, 4, 5], 16, 64)
        assert [w.count for w in words] == [4, 1]
        assert unpack_word(words[1]) == (5,)

    def test_charges_one_unit_per_value(self):
        m = Machine(64)
        pack_values([1, 2, 3], 8, 64, machine=m)
        assert m.unit_ops == 3

    def test_layout_error(self):
        with pytest.raises(WordLayoutError):
            PackedWord(word=0, slot_width=33, count=2, word_len=64, slots=(0, 0))
        m = Machine(64)
        with pytest.raises(WordLayoutError):
            packed_hash_compare(m, one_word((1,), 3), one_word((1,), 4), 0)
        with pytest.raises(WordLayoutError):
            ov_word(m, one_word((1,), 3), one_word((1,), 4))


class TestPackedHashCompare:
    def test_exact_sum_single_slot(self):
        m = Machine(64)
        assert packed_hash_compare(m, one_word((5,), 3), one_word((2,), 3), 7)

    def test_zero_slots_false(self):
        m = Machine(64)
        assert not packed_hash_compare(m, one_word((0,), 3), one_word((0,), 3), 5)

    def test_minus_one_slack(self):
        # 3 + 3 = 6 = ht - 1: the slack branch must accept
        m = Machine(64)
        assert packed_hash_compare(m, one_word((3,), 3), one_word((3,), 3), 7)

    def test_wraparound(self):
        # 6 + 5 = 11 ≡ 3 (mod 8)
        m = Machine(64)
        assert packed_hash_compare(m, one_word((6,), 3), one_word((5,), 3), 3)

    def test_agrees_with_reference_10k(self, rnd):
        m = Machine(64)
        for _ in range(10_000):
            mb = rnd.choice((3, 4, 6))
            cap = 64 // mb
            sa = [rnd.randrange(1 << mb) for _ in range(rnd.randint(1, cap))]
            sb = [rnd.randrange(1 << mb) for _ in range(rnd.randint(1, cap))]
            ht = rnd.randrange(1 << mb)
            got = packed_hash_compare(m, one_word(sa, mb), one_word(sb, mb), ht)
            assert got == ref_hash_compare(sa, sb, ht, mb)


class TestOvWord:
    def test_orthogonal_pair(self):
        m = Machine(64)
        assert ov_word(m, one_word((0b01, 0b11), 2), one_word((0b10,), 2))

    def test_all_overlap(self):
        m = Machine(64)
        assert not ov_word(m, one_word((0b11,), 2), one_word((0b11,), 2))

    def test_agrees_with_reference_10k(self, rnd):
        m = Machine(64)
        for _ in range(10_000):
            c = rnd.choice((4, 6, 8))
            cap = 64 // c
            su = [rnd.randrange(1 << c) for _ in range(rnd.randint(1, cap))]
            sv = [rnd.randrange(1 << c) for _ in range(rnd.randint(1, cap))]
            got = ov_word(m, one_word(su, c), one_word(sv, c))
            assert got == ref_ov(su, sv)


class TestQuarterCatalog:
    def test_enumeration_order_and_len(self):
        cat = QuarterCatalog(4, 2)
        assert cat.masks == tuple(
            msk for msk in range(16) if bin(msk).count("1") <= 2
        )
        assert len(cat) == 1 + 4 + 6

    def test_collections_disjoint_matches_brute(self, rnd):
        cat = QuarterCatalog(4, 2)
        width = len(cat)
        for _ in range(500):
            ba = rnd.randrange(1 << width)
            bb = rnd.randrange(1 << width)
            brute = any(
                cat.masks[i] & cat.masks[j] == 0
                for i in range(width)
                if (ba >> i) & 1
                for j in range(width)
                if (bb >> j) & 1
            )
            assert cat.collections_disjoint(ba, bb) == brute

    def test_couple_encoding_round_trip(self, rnd):
        cat = QuarterCatalog(3, 1)
        hash_bits = 5
        assert couple_slot_width(hash_bits, cat) == 5 + len(cat)
        for _ in range(100):
            h = rnd.randrange(1 << hash_bits)
            bits = rnd.randrange(1 << len(cat))
            slot = encode_couple(h, bits, cat)
            assert decode_couple(slot, hash_bits, cat) == (h, bits)


class TestHashOvWord:
    def _couple_word(self, couples, hash_bits, cat, word_len=64):
        width = couple_slot_width(hash_bits, cat)
        slots = [encode_couple(h, b, cat) for h, b in couples]
        return one_word(slots, width, word_len)

    def test_disjoint_and_exact_hash(self):
        cat = QuarterCatalog(4, 2)
        m = Machine(256)
        u = self._couple_word(
            [(3, 1 << cat.index_of[0b0011])], 4, cat, 256
        )
        v = self._couple_word(
            [(4, 1 << cat.index_of[0b1100])], 4, cat, 256
        )
        assert hash_ov_word(m, u, v, 7, 4, cat)

    def test_overlapping_collections_false(self):
        cat = QuarterCatalog(4, 2)
        m = Machine(256)
        u = self._couple_word(
            [(3, 1 << cat.index_of[0b0011])], 4, cat, 256
        )
        v = self._couple_word(
            [(4, 1 << cat.index_of[0b0010])], 4, cat, 256
        )
        assert not hash_ov_word(m, u, v, 7, 4, cat)

    def test_hash_gate_blocks_disjoint_pair(self):
        # collections are disjoint but the hash sum misses {ht, ht-1}
        cat = QuarterCatalog(4, 2)
        m = Machine(256)
        u = self._couple_word([(1, 1 << cat.index_of[0b0011])], 4, cat, 256)
        v = self._couple_word([(1, 1 << cat.index_of[0b1100])], 4, cat, 256)
        assert not hash_ov_word(m, u, v, 7, 4, cat)

    def test_agrees_with_reference_10k(self, rnd):
        cat = QuarterCatalog(3, 1)  # 4 catalog entries
        hash_bits = 4
        width = couple_slot_width(hash_bits, cat)
        m = Machine(64)
        cap = 64 // width
        for _ in range(10_000):
            su = [rnd.randrange(1 << width) for _ in range(rnd.randint(1, cap))]
            sv = [rnd.randrange(1 << width) for _ in range(rnd.randint(1, cap))]
            ht = rnd.randrange(1 << hash_bits)
            u = one_word(su, width)
            v = one_word(sv, width)
            assert hash_ov_word(m, u, v, ht, hash_bits, cat) == ref_hash_ov(
                su, sv, ht, hash_bits, cat
            )


class TestMemoTable:
    def test_exhaustive_ov_12_bits(self):
        # each 6-bit index decodes to two 3-bit slots
        scratch = Machine(6)

        def fn(i, j):
            u = one_word([(i >> 3) & 7, i & 7], 3, 6)
            v = one_word([(j >> 3) & 7, j & 7], 3, 6)
            return ov_word(scratch, u, v)

        table = build_memo(fn, 12)
        assert table.build_cost == 1 << 12
        for i in range(64):
            for j in range(64):
                assert table.lookup(i, j) == fn(i, j)

    def test_zero_width_single_entry(self):
        table = build_memo(lambda i, j: True, 0)
        assert table.build_cost == 1
        assert table.lookup(0, 0) is True
        with pytest.raises(ValueError):
            table.lookup(1, 0)

    def test_hash_compare_table_random_probes(self, rnd):
        scratch = Machine(6)

        def fn(i, j):
            wa = one_word([(i >> 3) & 7, i & 7], 3, 6)
            wb = one_word([(j >> 3) & 7, j & 7], 3, 6)
            return packed_hash_compare(scratch, wa, wb, 5)

        table = build_memo(fn, 12)
        for _ in range(4096):
            i = rnd.randrange(64)
            j = rnd.randrange(64)
            assert table.lookup(i, j) == fn(i, j)

    def test_cap_refused(self):
        with pytest.raises(ValueError):
            build_memo(lambda i, j: False, MEMO_CAP_BITS + 1)

    def test_odd_width_split(self):
        table = build_memo(lambda i, j: i == 2 * j, 5)
        assert table.hi_bits == 3 and table.lo_bits == 2
        for i in range(8):
            for j in range(4):
                assert table.lookup(i, j) == (i == 2 * j)

    def test_on_demand_wide_table(self):
        # above the materialization threshold but under the cap: answers
        # come from the predicate, extensionally identical
        table = build_memo(lambda i, j: (i ^ j) & 1 == 0, 24)
        assert table._bits is None
        assert table.lookup(5, 3) is True
        assert table.lookup(4, 3) is False

    def test_lookup_charges_mem(self):
        m = Machine(64, model="word")
        table = build_memo(lambda i, j: False, 4)
        table.lookup(1, 1, machine=m)
        assert m.mem_ops == 1

    def test_memo_equals_direct_up_to_20_bits(self):
        # extensional equality of the materialized table and the
        # on-the-fly predicate over the complete index domain
        def fn(i, j):
            return ((i * 37) ^ (j * 11)) % 5 == 0

        for width in (0, 1, 7, 13, 20):
            table = build_memo(fn, width)
            hi, lo = table.hi_bits, table.lo_bits
            for i in range(1 << hi):
                for j in range(1 << lo):
                    assert table.lookup(i, j) == fn(i, j)
