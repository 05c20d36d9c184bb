"""Sorted subset-sum lists: construction, restriction, splitting, merging.

Lists are built by iterative sorted merges (one value absorbed per
round, duplicates removed), which costs the sum of the intermediate list
lengths — on inputs with few distinct subset sums the intermediate lists
collapse early, so the cost tracks the output size rather than 2^k.
Values are absorbed in ascending order to maximize that collapse.

Each list optionally carries, per distinct sum, one generating subset
mask (bits indexed into the *original* instance), which is how every
solver reconstructs witnesses.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

from .wordram import Machine

__all__ = [
    "SumList",
    "ResidueSplit",
    "EnumerationCapError",
    "sorted_sum_enumeration",
    "restricted_enumeration",
    "enumerate_indices",
    "enumerate_with_core",
    "residue_split",
    "merge_sorted",
]

DEFAULT_CAP = 30


class EnumerationCapError(ValueError):
    """The requested enumeration would exceed the configured size cap."""


@dataclass(frozen=True)
class SumList:
    """Strictly increasing distinct subset sums of a source multiset."""

    sums: tuple[int, ...]
    source_size: int
    masks: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.masks is not None and len(self.masks) != len(self.sums):
            raise ValueError("masks must parallel sums")

    def __len__(self) -> int:
        return len(self.sums)


@dataclass(frozen=True)
class ResidueSplit:
    """A sum list partitioned by residue class modulo p."""

    p: int
    sublists: dict[int, SumList]


def _merge_add(
    sums: list[int],
    masks: list[int] | None,
    value: int,
    bit: int,
    machine: Machine | None,
) -> tuple[list[int], list[int] | None]:
    """One absorption round: merge L with (L + value), deduplicated.

    For equal sums the existing (value-free) mask is kept, so each sum
    retains one arbitrary-but-valid generating subset.
    """
    n0 = len(sums)
    out_sums: list[int] = []
    out_masks: list[int] | None = [] if masks is not None else None
    i = 0
    j = 0
    steps = 0
    while i < n0 or j < n0:
        take_left: bool
        if i >= n0:
            take_left = False
        elif j >= n0:
            take_left = True
        else:
            take_left = sums[i] <= sums[j] + value
        if take_left:
            s = sums[i]
            if not out_sums or out_sums[-1] != s:
                out_sums.append(s)
                if out_masks is not None:
                    out_masks.append(masks[i])  # type: ignore[index]
            i += 1
        else:
            s = sums[j] + value
            if not out_sums or out_sums[-1] != s:
                out_sums.append(s)
                if out_masks is not None:
                    out_masks.append(masks[j] | bit)  # type: ignore[index]
            j += 1
        steps += 1
    if machine is not None:
        machine.unit(steps)
    return out_sums, out_masks


def enumerate_indices(
    values: Sequence[int],
    indices: Iterable[int],
    machine: Machine | None = None,
    with_masks: bool = False,
    cap: int = DEFAULT_CAP,
) -> SumList:
    """Sorted distinct subset sums over the given index subset.

    Masks refer to positions in ``values`` so witnesses compose across
    different index subsets of the same instance.
    """
    idx = list(indices)
    if len(idx) > cap:
        raise EnumerationCapError(
            f"enumerating {len(idx)} values exceeds the cap of {cap}"
        )
    order = sorted(idx, key=lambda i: values[i])
    sums = [0]
    masks: list[int] | None = [0] if with_masks else None
    for i in order:
        sums, masks = _merge_add(sums, masks, values[i], 1 << i, machine)
    return SumList(
        sums=tuple(sums),
        source_size=len(idx),
        masks=tuple(masks) if masks is not None else None,
    )


def sorted_sum_enumeration(
    values: Sequence[int],
    machine: Machine | None = None,
    with_masks: bool = False,
    cap: int = DEFAULT_CAP,
) -> SumList:
    """Sorted distinct subset sums of the whole multiset."""
    return enumerate_indices(
        values, range(len(values)), machine=machine, with_masks=with_masks, cap=cap
    )


def restricted_enumeration(
    values: Sequence[int],
    max_size: int,
    machine: Machine | None = None,
    with_masks: bool = False,
    cap: int = DEFAULT_CAP,
    indices: Iterable[int] | None = None,
) -> SumList:
    """Sorted distinct sums over sub-multisets of size at most max_size."""
    idx = list(indices) if indices is not None else list(range(len(values)))
    if not (0 <= max_size <= len(idx)):
        raise ValueError("max_size must lie in [0, |Y|]")
    if len(idx) > cap:
        raise EnumerationCapError(
            f"enumerating {len(idx)} values exceeds the cap of {cap}"
        )
    order = sorted(idx, key=lambda i: values[i])
    # per pick-count sorted lists, merged at the end
    by_count_sums: list[list[int]] = [[0]] + [[] for _ in range(max_size)]
    by_count_masks: list[list[int]] | None = None
    if with_masks:
        by_count_masks = [[0]] + [[] for _ in range(max_size)]
    for i in order:
        v = values[i]
        bit = 1 << i
        for c in range(max_size, 0, -1):
            lower_s = by_count_sums[c - 1]
            if not lower_s:
                continue
            shifted = [s + v for s in lower_s]
            cur = by_count_sums[c]
            merged: list[int] = []
            merged_masks: list[int] = []
            a = 0
            b = 0
            steps = 0
            cur_masks = by_count_masks[c] if by_count_masks is not None else None
            low_masks = by_count_masks[c - 1] if by_count_masks is not None else None
            while a < len(cur) or b < len(shifted):
                if b >= len(shifted) or (a < len(cur) and cur[a] <= shifted[b]):
                    s = cur[a]
                    if not merged or merged[-1] != s:
                        merged.append(s)
                        if cur_masks is not None:
                            merged_masks.append(cur_masks[a])
                    a += 1
                else:
                    s = shifted[b]
                    if not merged or merged[-1] != s:
                        merged.append(s)
                        if low_masks is not None:
                            merged_masks.append(low_masks[b] | bit)
                    b += 1
                steps += 1
            if machine is not None:
                machine.unit(steps)
            by_count_sums[c] = merged
            if by_count_masks is not None:
                by_count_masks[c] = merged_masks
    pair_lists = []
    for c in range(max_size + 1):
        if by_count_masks is not None:
            pair_lists.append(
                list(zip(by_count_sums[c], by_count_masks[c]))
            )
        else:
            pair_lists.append([(s, 0) for s in by_count_sums[c]])
    merged_pairs: list[tuple[int, int]] = []
    steps = 0
    for s, msk in heapq.merge(*pair_lists, key=lambda e: e[0]):
        if not merged_pairs or merged_pairs[-1][0] != s:
            merged_pairs.append((s, msk))
        steps += 1
    if machine is not None:
        machine.unit(steps)
    return SumList(
        sums=tuple(s for s, _ in merged_pairs),
        source_size=len(idx),
        masks=tuple(m for _, m in merged_pairs) if with_masks else None,
    )


def enumerate_with_core(
    values: Sequence[int],
    core_indices: Iterable[int],
    core_max_picks: int,
    rest_indices: Iterable[int],
    machine: Machine | None = None,
    with_masks: bool = False,
    cap: int = DEFAULT_CAP,
) -> SumList:
    """Sums over subsets taking at most core_max_picks core elements.

    The pick restriction applies only to the core; the remaining indices
    are absorbed unrestricted.  Used by the unbalanced preprocessing,
    where the core is the distinguished subset and the bound excludes
    balanced intersections.
    """
    core = list(core_indices)
    rest = list(rest_indices)
    if len(core) + len(rest) > cap:
        raise EnumerationCapError(
            f"enumerating {len(core) + len(rest)} values exceeds the cap of {cap}"
        )
    base = restricted_enumeration(
        values,
        core_max_picks,
        machine=machine,
        with_masks=with_masks,
        cap=cap,
        indices=core,
    )
    sums = list(base.sums)
    masks = list(base.masks) if base.masks is not None else None
    for i in sorted(rest, key=lambda k: values[k]):
        sums, masks = _merge_add(sums, masks, values[i], 1 << i, machine)
    return SumList(
        sums=tuple(sums),
        source_size=len(core) + len(rest),
        masks=tuple(masks) if masks is not None else None,
    )


def residue_split(source: SumList, p: int, machine: Machine | None = None) -> ResidueSplit:
    """Partition a sum list by residue modulo p, preserving order.

    Each reduction is a modular division, charged at multiplication
    cost.
    """
    if p < 1:
        raise ValueError("modulus must be >= 1")
    buckets_sums: dict[int, list[int]] = {}
    buckets_masks: dict[int, list[int]] | None = {} if source.masks is not None else None
    for pos, s in enumerate(source.sums):
        r = s % p
        buckets_sums.setdefault(r, []).append(s)
        if buckets_masks is not None:
            buckets_masks.setdefault(r, []).append(source.masks[pos])  # type: ignore[index]
    if machine is not None:
        machine.mul(len(source.sums))
    sublists = {
        r: SumList(
            sums=tuple(buckets_sums[r]),
            source_size=source.source_size,
            masks=tuple(buckets_masks[r]) if buckets_masks is not None else None,
        )
        for r in buckets_sums
    }
    return ResidueSplit(p=p, sublists=sublists)


def merge_sorted(
    lists: Sequence[Sequence],
    machine: Machine | None = None,
    compress: bool = False,
):
    """Stable k-way merge of sorted lists.

    Without compression the items are merged as-is (plain sums or
    tuples compared by their first field).  With compression the items
    must be (sum, bitmap) pairs and equal-sum entries are combined into
    one entry whose bitmap is the union — the collection-entry format of
    the residue-filtered scans.
    """
    steps = 0
    if compress:
        out: list[tuple[int, int]] = []
        for s, bits in heapq.merge(*lists, key=lambda e: e[0]):
            if out and out[-1][0] == s:
                out[-1] = (s, out[-1][1] | bits)
            else:
                out.append((s, bits))
            steps += 1
        if machine is not None:
            machine.unit(steps)
        return out
    plain: list = []
    first = lambda e: e[0] if isinstance(e, tuple) else e
    for item in heapq.merge(*lists, key=first):
        plain.append(item)
        steps += 1
    if machine is not None:
        machine.unit(steps)
    return plain
