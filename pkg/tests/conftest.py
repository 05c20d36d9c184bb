"""Shared helpers: reproducible random instances with known ground truth."""
from __future__ import annotations

import random

import pytest

from logshave.core import Instance, brute_force


def random_instance(
    rnd: random.Random,
    n_lo: int = 6,
    n_hi: int = 16,
    bits_choices: tuple[int, ...] = (10, 14, 20),
    word_len: int | None = None,
    force_yes: bool | None = None,
) -> Instance:
    """A random instance; ``force_yes`` plants (True) or leaves the target
    random (None).  ``force_yes=False`` is not offered — unsatisfiability
    must come from a checked construction, not hope."""
    n = rnd.randint(n_lo, n_hi)
    bits = rnd.choice(bits_choices)
    values = [rnd.randint(1, (1 << bits) - 1) for _ in range(n)]
    plant = force_yes if force_yes is not None else rnd.random() < 0.5
    if plant:
        k = rnd.randint(1, n)
        idx = rnd.sample(range(n), k)
        target = sum(values[i] for i in idx)
    else:
        target = rnd.randint(1, sum(values))
    target = max(target, max(values))
    values = [min(v, target) for v in values]
    return Instance.make(values, target, word_len=word_len)


@pytest.fixture
def rnd() -> random.Random:
    return random.Random(0xC0FFEE)


def oracle_answer(inst: Instance) -> bool:
    return brute_force(inst).answer
