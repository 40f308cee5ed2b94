"""Bit-flip mutation operators."""
from __future__ import annotations

import enum
import math

import numpy as np

from .core import RandomSource, Solution


class MutationOperator(enum.Enum):
    STANDARD = "standard"
    PLUS = "plus"

    @classmethod
    def parse(cls, value) -> "MutationOperator":
        if isinstance(value, cls):
            return value
        aliases = {"standard": cls.STANDARD, "standardbit": cls.STANDARD,
                   "plus": cls.PLUS, "standardbitplus": cls.PLUS}
        try:
            return aliases[str(value).lower().replace("-", "").replace("_", "")]
        except KeyError:
            raise ValueError(f"unknown mutation operator {value!r}") from None


def _flip_positions(n: int, rng: RandomSource, allow_zero: bool) -> np.ndarray:
    # The flip count of independent 1/n flips is Binomial(n, 1/n) and, given
    # the count, the flipped positions are a uniform subset.  Sampling it this
    # way is equal in law to n Bernoulli draws and O(#flips) instead of O(n).
    while True:
        k = rng.binomial(n, 1.0 / n)
        if k or allow_zero:
            break
    if k == 0:
        return np.empty(0, dtype=np.int64)
    while True:
        pos = rng.integers(n, size=k)
        if k == 1 or np.unique(pos).size == k:
            return pos


def mutate(op: MutationOperator, parent: Solution, rng: RandomSource) -> Solution:
    """Standard bit mutation, or its "plus" variant which redraws from
    scratch until at least one bit differs from the parent."""
    pos = _flip_positions(parent.n, rng, allow_zero=op is MutationOperator.STANDARD)
    bits = parent.bits.copy()
    bits[pos] ^= True
    return Solution._adopt(bits)


def single_bit_flip_probability(n: int) -> float:
    """Probability that standard bit mutation flips one specific bit only."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return (1.0 / n) * (1.0 - 1.0 / n) ** (n - 1)


def flip_count_pmf(n: int) -> np.ndarray:
    """Binomial(n, 1/n) probabilities for 0..n flips."""
    p = 1.0 / n
    return np.array([math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n + 1)])
