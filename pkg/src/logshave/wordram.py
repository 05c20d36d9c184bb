"""Simulated word RAM: cost ledger, packed words, and word-level predicates.

A :class:`Machine` models a RAM over fixed-width words with two charging
models:

* ``circuit`` — any of the three word predicates below (packed-hash
  compare, packed disjointness, hash-plus-disjointness) costs one unit,
  while a multiplication costs ``ceil(log2(word_len))``.
* ``word`` — multiplication is a single unit, but the word predicates are
  not atomic: each call is charged as the memo-table lookup or the
  per-slot rotation loop that realizes it.

Machine words are ordinary Python integers (arbitrary-precision ints are
already limb arrays); the machine's ``word_len`` fixes the simulated
width and all packing layouts.  Costs are *charged* to the ledger by the
algorithms; the Python-level work that computes the same values is the
simulator, not the machine being modeled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "Machine",
    "PackedWord",
    "MemoTable",
    "QuarterCatalog",
    "WordLayoutError",
    "pack_values",
    "unpack_word",
    "packed_hash_compare",
    "ov_word",
    "hash_ov_word",
    "build_memo",
]

MEMO_CAP_BITS = 26
# Above this total index width a table is charged as a lookup but the
# entries are evaluated on demand rather than materialized (identical
# outputs; materializing 2^26 Python-level entries is pure waste).
_MEMO_MATERIALIZE_BITS = 22


class WordLayoutError(ValueError):
    """Packed operands disagree on slot layout."""


def ceil_log2(x: int) -> int:
    if x <= 1:
        return 0
    return (x - 1).bit_length()


class Machine:
    """An instrumented RAM context with word length ``word_len`` bits."""

    __slots__ = (
        "word_len",
        "model",
        "mask",
        "memo_cap_bits",
        "unit_ops",
        "mul_ops",
        "ac0_ops",
        "mem_ops",
        "_memo_registry",
    )

    def __init__(self, word_len: int, model: str = "circuit", memo_cap_bits: int = MEMO_CAP_BITS):
        if word_len < 1:
            raise ValueError("word_len must be >= 1")
        if model not in ("circuit", "word"):
            raise ValueError("model must be 'circuit' or 'word'")
        self.word_len = word_len
        self.model = model
        self.mask = (1 << word_len) - 1
        self.memo_cap_bits = memo_cap_bits
        self.unit_ops = 0
        self.mul_ops = 0
        self.ac0_ops = 0
        self.mem_ops = 0
        self._memo_registry: dict[tuple, MemoTable] = {}

    # -- charging -----------------------------------------------------
    def unit(self, k: int = 1) -> None:
        self.unit_ops += k

    def mem(self, k: int = 1) -> None:
        self.mem_ops += k

    def mul(self, k: int = 1) -> None:
        self.mul_ops += k

    def _charge_predicate(self, loop_cost: int, memo_key: tuple | None = None) -> None:
        """Charge one word-predicate evaluation under the active model."""
        if self.model == "circuit":
            self.ac0_ops += 1
            return
        # word model: the predicate is realized either by a registered
        # memo table (one lookup) or by a rotation loop over slots.
        if memo_key is not None and memo_key in self._memo_registry:
            self.mem_ops += 1
            return
        self.unit_ops += max(1, loop_cost)

    @property
    def mul_cost(self) -> int:
        return 1 if self.model == "word" else max(1, ceil_log2(self.word_len))

    @property
    def ac0_cost(self) -> int:
        return 1

    @property
    def charged_cost(self) -> int:
        return (
            self.unit_ops
            + self.mem_ops
            + self.ac0_cost * self.ac0_ops
            + self.mul_cost * self.mul_ops
        )

    def counters(self) -> dict[str, int]:
        return {
            "unit_ops": self.unit_ops,
            "mul_ops": self.mul_ops,
            "ac0_ops": self.ac0_ops,
            "mem_ops": self.mem_ops,
            "charged_cost": self.charged_cost,
        }

    def register_memo(self, key: tuple, table: "MemoTable") -> None:
        """Attach a prebuilt memo table; its build cost is charged here."""
        self._memo_registry[key] = table
        self.mem_ops += table.build_cost

    def capacity(self, slot_width: int) -> int:
        """How many slot_width-bit fields fit in one word (at least 1)."""
        if slot_width <= 0:
            raise ValueError("slot_width must be positive")
        return max(1, self.word_len // slot_width)


@dataclass(frozen=True)
class PackedWord:
    """Several fixed-width fields packed into one machine word.

    Layout is big-endian: slot 0 occupies the highest-order bits, so an
    unsigned comparison of two fully packed words respects the order of
    their leading slots.  Only the first ``count`` slots are occupied;
    trailing space is zero-filled and excluded from every predicate
    (there is no slot value that could act as a never-matching sentinel,
    so occupancy is tracked explicitly).
    """

    word: int
    slot_width: int
    count: int
    word_len: int
    slots: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.slot_width * self.count > self.word_len:
            raise WordLayoutError("slots exceed word length")
        if len(self.slots) != self.count:
            raise WordLayoutError("slot cache does not match count")


def pack_values(
    values: list[int] | tuple[int, ...],
    slot_width: int,
    word_len: int,
    machine: Machine | None = None,
) -> list[PackedWord]:
    """Pack a list of slot_width-bit values into words, order-preserving.

    Consecutive runs of ``word_len // slot_width`` values go into one
    word each; the final word may be partially occupied.  Charges one
    unit per packed value (a shift-or) when a machine is supplied.
    """
    cap = max(1, word_len // slot_width)
    fmask = (1 << slot_width) - 1
    out: list[PackedWord] = []
    for start in range(0, len(values), cap):
        chunk = tuple(v & fmask for v in values[start : start + cap])
        word = 0
        for idx, v in enumerate(chunk):
            word |= v << (word_len - (idx + 1) * slot_width)
        out.append(
            PackedWord(
                word=word,
                slot_width=slot_width,
                count=len(chunk),
                word_len=word_len,
                slots=chunk,
            )
        )
    if machine is not None:
        machine.unit(len(values))
    return out


def unpack_word(pw: PackedWord) -> tuple[int, ...]:
    """Recover the occupied slots of a packed word from its raw bits."""
    fmask = (1 << pw.slot_width) - 1
    out = []
    for idx in range(pw.count):
        shift = pw.word_len - (idx + 1) * pw.slot_width
        out.append((pw.word >> shift) & fmask)
    return tuple(out)


def _check_layout(wa: PackedWord, wb: PackedWord) -> None:
    if wa.slot_width != wb.slot_width:
        raise WordLayoutError(
            f"slot width mismatch: {wa.slot_width} vs {wb.slot_width}"
        )


def packed_hash_compare(
    machine: Machine, wa: PackedWord, wb: PackedWord, ht: int
) -> bool:
    """Does any slot pair sum to ht or ht-1 modulo 2^slot_width?

    The two-value membership absorbs the +-1 slack of the pseudolinear
    hash.  One predicate charge under the active cost model.
    """
    _check_layout(wa, wb)
    m = wa.slot_width
    machine._charge_predicate(
        loop_cost=max(wa.count, wb.count),
        memo_key=("phc", m, machine.word_len),
    )
    mod = 1 << m
    targets = frozenset(((ht % mod), (ht - 1) % mod))
    bset = set(wb.slots)
    for a in wa.slots:
        for tv in targets:
            if (tv - a) % mod in bset:
                return True
    return False


def ov_word(machine: Machine, u: PackedWord, v: PackedWord) -> bool:
    """Does any slot pair have empty bitwise intersection?

    Slots are characteristic vectors of subsets; an orthogonal pair
    witnesses a disjoint subset pair.  One predicate charge.
    """
    _check_layout(u, v)
    machine._charge_predicate(
        loop_cost=max(u.count, v.count),
        memo_key=("ov", u.slot_width, machine.word_len),
    )
    for x in u.slots:
        for y in v.slots:
            if x & y == 0:
                return True
    return False


class QuarterCatalog:
    """Enumerated near-quarter subsets of a size-c ground set.

    Index order is numeric order of the subset masks (the canonical
    bitmap layout used everywhere a collection-of-subsets is stored in a
    word).  Also precomputes, for each catalog entry, the bitmap of
    entries disjoint from it, making collection-vs-collection
    disjointness a single AND per entry.
    """

    __slots__ = ("c_size", "max_size", "masks", "index_of", "disjoint_bitmaps")

    def __init__(self, c_size: int, max_size: int):
        if c_size < 0:
            raise ValueError("c_size must be >= 0")
        self.c_size = c_size
        self.max_size = max_size
        self.masks: tuple[int, ...] = tuple(
            mask
            for mask in range(1 << c_size)
            if mask.bit_count() <= max_size
        )
        self.index_of = {mask: i for i, mask in enumerate(self.masks)}
        disjoint = []
        for mask in self.masks:
            bitmap = 0
            for j, other in enumerate(self.masks):
                if mask & other == 0:
                    bitmap |= 1 << j
            disjoint.append(bitmap)
        self.disjoint_bitmaps: tuple[int, ...] = tuple(disjoint)

    def __len__(self) -> int:
        return len(self.masks)

    def collections_disjoint(self, bits_a: int, bits_b: int) -> bool:
        """Do the two collections contain some disjoint subset pair?"""
        rem = bits_a
        while rem:
            low = rem & -rem
            idx = low.bit_length() - 1
            if self.disjoint_bitmaps[idx] & bits_b:
                return True
            rem ^= low
        return False


def couple_slot_width(hash_bits: int, catalog: QuarterCatalog) -> int:
    """Bits per (hash, collection-bitmap) couple slot."""
    return hash_bits + len(catalog)


def encode_couple(hash_value: int, collection_bits: int, catalog: QuarterCatalog) -> int:
    """Pack one couple: hash in the high bits, collection bitmap below."""
    return (hash_value << len(catalog)) | collection_bits


def decode_couple(slot: int, hash_bits: int, catalog: QuarterCatalog) -> tuple[int, int]:
    width = len(catalog)
    return slot >> width, slot & ((1 << width) - 1)


def hash_ov_word(
    machine: Machine,
    u: PackedWord,
    v: PackedWord,
    ht: int,
    hash_bits: int,
    catalog: QuarterCatalog,
) -> bool:
    """Combined test over packed (hash, collection) couples.

    True iff some couple pair passes the two-value hash membership of
    :func:`packed_hash_compare` *and* its two collections contain a
    disjoint subset pair.  One predicate charge.
    """
    _check_layout(u, v)
    machine._charge_predicate(
        loop_cost=max(u.count, v.count),
        memo_key=("hov", u.slot_width, machine.word_len),
    )
    mod = 1 << hash_bits
    targets = ((ht % mod), (ht - 1) % mod)
    decoded_v = [decode_couple(s, hash_bits, catalog) for s in v.slots]
    for sa in u.slots:
        ha, bits_a = decode_couple(sa, hash_bits, catalog)
        if not bits_a:
            continue
        for hb, bits_b in decoded_v:
            if not bits_b:
                continue
            if (ha + hb) % mod in targets and catalog.collections_disjoint(
                bits_a, bits_b
            ):
                return True
    return False


class MemoTable:
    """Precomputed outcomes of a two-argument word predicate.

    The index is the concatenation i||j of the two operands;
    ``index_width`` is the total bit count (split as evenly as possible,
    the first operand taking the extra bit when odd).  Tables up to
    ``_MEMO_MATERIALIZE_BITS`` are materialized as a bitmap; wider ones
    (still within the cap) answer from the predicate on demand, which is
    extensionally identical and charged the same.
    """

    __slots__ = ("fn", "index_width", "hi_bits", "lo_bits", "build_cost", "_bits")

    def __init__(self, fn, index_width: int):
        if index_width < 0:
            raise ValueError("index_width must be >= 0")
        if index_width > MEMO_CAP_BITS:
            raise ValueError(
                f"index width {index_width} exceeds the {MEMO_CAP_BITS}-bit cap; "
                "full-scale virtual-word tables are out of reach at realistic "
                "sizes and must be clamped"
            )
        self.fn = fn
        self.index_width = index_width
        self.lo_bits = index_width // 2
        self.hi_bits = index_width - self.lo_bits
        self.build_cost = 1 << index_width
        if index_width <= _MEMO_MATERIALIZE_BITS:
            nbits = 1 << index_width
            bits = bytearray((nbits + 7) // 8)
            pos = 0
            for i in range(1 << self.hi_bits):
                for j in range(1 << self.lo_bits):
                    if fn(i, j):
                        bits[pos >> 3] |= 1 << (pos & 7)
                    pos += 1
            self._bits = bytes(bits)
        else:
            self._bits = None

    def lookup(self, i: int, j: int, machine: Machine | None = None) -> bool:
        if not (0 <= i < (1 << self.hi_bits)) or not (0 <= j < (1 << self.lo_bits)):
            raise ValueError("memo index out of range")
        if machine is not None:
            machine.mem(1)
        if self._bits is None:
            return bool(self.fn(i, j))
        pos = (i << self.lo_bits) | j
        return bool(self._bits[pos >> 3] & (1 << (pos & 7)))


def build_memo(fn, index_width: int) -> MemoTable:
    """Tabulate ``fn`` over all index pairs; see :class:`MemoTable`."""
    return MemoTable(fn, index_width)
