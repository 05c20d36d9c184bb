"""Pure-Python backend implementing the kernel protocol.

``brute_force_scan`` is implemented here directly (it is the only
kernel with no instrumented twin to fall back on).  The solver kernels
return ``NotImplemented`` so their callers run the instrumented
reference implementations instead; that keeps exactly one Python
source of truth for each algorithm.
"""

from __future__ import annotations

__all__ = [
    "brute_force_scan",
    "mim_decide",
    "bitpack_decide",
    "repov_decide",
    "packedrepov_decide",
]


def brute_force_scan(values, target: int):
    """First subset mask summing to target along a reflected-code walk.

    Returns the mask as an int, or None.  The walk flips exactly one
    element per step (the lowest set bit of the step counter), so the
    compiled backend can reproduce the identical visiting order and
    therefore the identical witness.
    """
    if target == 0:
        return 0
    n = len(values)
    mask = 0
    acc = 0
    for k in range(1, 1 << n):
        b = (k & -k).bit_length() - 1
        bit = 1 << b
        if mask & bit:
            mask ^= bit
            acc -= values[b]
        else:
            mask |= bit
            acc += values[b]
        if acc == target:
            return mask
    return None


def mim_decide(values, target, word_len):
    return NotImplemented


def bitpack_decide(values, target, word_len, rng_seed):
    return NotImplemented


def repov_decide(values, target, word_len, rng_seed, c_s, c_k):
    return NotImplemented


def packedrepov_decide(values, target, word_len, rng_seed, c_s, c_k):
    return NotImplemented
