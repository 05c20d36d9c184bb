"""Multiply-shift hashing with an additive two-value guarantee.

The family maps an ell-bit integer y to the top m bits of (u*y mod
2^ell) for a uniformly random odd multiplier u.  Two properties drive
its use in the packed scans:

* near-additivity: hash(y) + hash(z) differs from hash(y+z) by 0 or 1
  modulo 2^m (the discarded low bits can carry at most once), so a
  packed membership test against {target, target-1} never misses;
* spread: two fixed distinct inputs collide with probability O(2^-m)
  over the draw of the multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._rng import SplitMix64
from .wordram import Machine, ceil_log2

__all__ = ["PseudolinearHash", "default_out_bits", "draw_hash", "hash_eval"]


@dataclass(frozen=True)
class PseudolinearHash:
    """The (multiplier, out_bits, word_len) multiply-shift hash."""

    multiplier: int
    out_bits: int
    word_len: int

    def __post_init__(self):
        if not (1 <= self.out_bits <= self.word_len):
            raise ValueError("out_bits must lie in [1, word_len]")
        if self.multiplier % 2 == 0:
            raise ValueError("multiplier must be odd")
        if not (0 < self.multiplier < (1 << self.word_len)):
            raise ValueError("multiplier must be a positive word_len-bit integer")


def default_out_bits(word_len: int) -> int:
    """Output width 3*ceil(log2(word_len)), clamped into [1, word_len]."""
    return max(1, min(word_len, 3 * ceil_log2(word_len)))


def draw_hash(word_len: int, out_bits: int, rng: SplitMix64) -> PseudolinearHash:
    """Draw a uniformly random odd multiplier; deterministic per seed."""
    if not (1 <= out_bits <= word_len):
        raise ValueError("out_bits must lie in [1, word_len]")
    if word_len == 1:
        u = 1
    else:
        u = (rng.next_bits(word_len - 1) << 1) | 1
    return PseudolinearHash(multiplier=u, out_bits=out_bits, word_len=word_len)


def hash_eval(h: PseudolinearHash, y: int, machine: Machine | None = None) -> int:
    """Evaluate the hash; charges one multiplication when instrumented."""
    if not (0 <= y < (1 << h.word_len)):
        raise ValueError("input out of word range")
    if machine is not None:
        machine.mul(1)
    return ((h.multiplier * y) & ((1 << h.word_len) - 1)) >> (h.word_len - h.out_bits)
