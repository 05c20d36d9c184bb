"""Deterministic randomness: a 64-bit splittable generator and primality testing.

Every randomized component of the library draws from :class:`SplitMix64`
seeded through :func:`derive_seed`, so that a master seed plus a tuple of
string/integer tags fully determines every random choice.  The native
kernels implement the identical generator, keeping both backends
bit-for-bit reproducible.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _finalize(z: int) -> int:
    """SplitMix64 output mixing function."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit generator (Steele-Lea-Flood splitmix64)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        return _finalize(self._state)

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        nbits = (bound - 1).bit_length()
        while True:
            v = self.next_bits(nbits)
            if v < bound:
                return v

    def next_bits(self, nbits: int) -> int:
        """Uniform integer in [0, 2^nbits)."""
        if nbits <= 0:
            return 0
        out = 0
        produced = 0
        while produced < nbits:
            out = (out << 64) | self.next_u64()
            produced += 64
        return out >> (produced - nbits)

    def next_range(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_below(hi - lo + 1)


def derive_seed(master: int, *tags: int | str) -> int:
    """Mix a master seed with arbitrary tags into a new 64-bit seed.

    Used to give every (algorithm, instance, trial) combination its own
    independent stream while remaining reproducible from one master seed.
    """
    x = master & MASK64
    for tag in tags:
        if isinstance(tag, str):
            data = tag.encode("utf-8")
            parts = [
                int.from_bytes(data[i : i + 8], "little")
                for i in range(0, len(data), 8)
            ]
            parts.append(len(data) | (1 << 63))
        else:
            value = int(tag)
            parts = []
            if value < 0:
                value = -value
                parts.append(1 << 62)
            while True:
                parts.append(value & MASK64)
                value >>= 64
                if not value:
                    break
        for part in parts:
            x = _finalize((x + _GOLDEN + part) & MASK64)
    return x


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(num: int) -> bool:
    """Deterministic Miller-Rabin, exact for all num < 2^64.

    For larger inputs the same fixed bases make the test a strong
    probable-prime check with error far below 2^-64; the library only
    ever samples primes that are polynomial in the word length, so the
    deterministic regime is the one exercised.
    """
    if num < 2:
        return False
    for sp in _SMALL_PRIMES:
        if num % sp == 0:
            return num == sp
    d = num - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for base in _SMALL_PRIMES:
        x = pow(base, d, num)
        if x == 1 or x == num - 1:
            continue
        for _ in range(r - 1):
            x = (x * x) % num
            if x == num - 1:
                break
        else:
            return False
    return True
