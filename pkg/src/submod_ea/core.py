"""Ground-set abstractions shared by every optimizer in the package.

A search point is a boolean vector of length ``n``; bit ``i`` set means ground
element ``i`` is selected.  Objective and cost functions map such vectors to
non-negative floats.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ContractError(ValueError):
    """Raised when a caller violates a documented precondition."""


class ConfigurationError(ValueError):
    """Raised for algorithm parameters that cannot produce a valid run."""


class RandomSource:
    """Seeded generator owned by a single run.

    Backed by the PCG64 permuted congruential generator (O'Neill, "PCG: A
    family of simple fast space-efficient statistically good algorithms for
    random number generation", HMC-CS-2014-0905).  Identical ``seed`` and
    ``stream`` plus an identical call sequence give identical outputs.

    ``stream`` selects an independent sub-stream for the same seed, which the
    harness uses to keep the cost draw apart from the per-run streams.
    """

    def __init__(self, seed: int, stream: int = 0):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ContractError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.stream = int(stream)
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def random(self, size=None):
        return self.generator.random(size)

    def uniform(self, low: float, high: float, size=None):
        return self.generator.uniform(low, high, size)

    def integers(self, high: int, size=None):
        return self.generator.integers(0, high, size=size)

    def binomial(self, n: int, p: float) -> int:
        return int(self.generator.binomial(n, p))

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream={self.stream})"


class Solution:
    """A subset of the ground set as a fixed-length, read-only bit vector.

    Objective and cost values are cached the first time they are computed
    through :func:`evaluate_cached`.
    """

    __slots__ = ("bits", "cached_f", "cached_c")

    def __init__(self, bits, cached_f: float | None = None, cached_c: float | None = None):
        arr = np.array(bits, dtype=bool, copy=True).reshape(-1)
        arr.setflags(write=False)
        self.bits = arr
        self.cached_f = cached_f
        self.cached_c = cached_c

    @classmethod
    def empty(cls, n: int) -> "Solution":
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def from_indices(cls, n: int, indices) -> "Solution":
        bits = np.zeros(n, dtype=bool)
        bits[list(indices)] = True
        return cls(bits)

    @classmethod
    def _adopt(cls, bits: np.ndarray) -> "Solution":
        # Takes ownership of a freshly built array without copying.
        bits.setflags(write=False)
        sol = cls.__new__(cls)
        sol.bits = bits
        sol.cached_f = None
        sol.cached_c = None
        return sol

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    def indices(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def with_bit(self, i: int, value: bool = True) -> "Solution":
        bits = self.bits.copy()
        bits[i] = value
        return Solution._adopt(bits)

    def __len__(self):
        return self.bits.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Solution):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __repr__(self):
        return f"Solution({self.indices()}, n={self.n})"


class ObjectiveFunction:
    """Set function over ``n`` ground elements.

    Subclasses implement :meth:`evaluate` on a boolean vector.  Monotonicity
    and submodularity are properties of concrete functions, checked by the
    exhaustive routines in :mod:`submod_ea.analysis`, never assumed here.
    """

    n: int

    def evaluate(self, bits: np.ndarray) -> float:
        raise NotImplementedError

    def evaluate_batch(self, rows: np.ndarray) -> np.ndarray:
        """Evaluate every row of a ``(m, n)`` boolean matrix."""
        return np.array([self.evaluate(r) for r in rows], dtype=np.float64)

    def __call__(self, x) -> float:
        return self.evaluate(x.bits if isinstance(x, Solution) else np.asarray(x, dtype=bool))


class CostFunction(ObjectiveFunction):
    """Monotone cost with ``evaluate(empty) == 0``.

    ``min_increment`` is a lower bound on the cost added by any single element.
    """

    min_increment: float


@dataclass(frozen=True)
class Instance:
    objective: ObjectiveFunction
    cost: CostFunction
    budget: float
    name: str = ""

    def __post_init__(self):
        if self.objective.n != self.cost.n:
            raise ContractError(
                f"objective has n={self.objective.n} but cost has n={self.cost.n}"
            )
        if not self.budget > 0:
            raise ContractError(f"budget must be positive, got {self.budget}")

    @property
    def n(self) -> int:
        return self.objective.n

    def with_budget(self, budget: float) -> "Instance":
        return Instance(self.objective, self.cost, budget, self.name)


def _check_length(n: int, x: Solution):
    if x.n != n:
        raise ContractError(f"solution has length {x.n}, instance expects {n}")


def marginal_gain(obj: ObjectiveFunction, x: Solution, i: int) -> float:
    """``f(X + i) - f(X)``; zero when ``i`` is already selected."""
    _check_length(obj.n, x)
    if not 0 <= i < obj.n:
        raise ContractError(f"element index {i} outside [0, {obj.n})")
    if x.bits[i]:
        return 0.0
    return obj.evaluate(x.with_bit(i).bits) - obj.evaluate(x.bits)


def evaluate_cached(inst: Instance, x: Solution) -> tuple[float, float]:
    """Return ``(f(x), c(x))``, computing each at most once per solution."""
    _check_length(inst.n, x)
    if x.cached_f is None:
        x.cached_f = float(inst.objective.evaluate(x.bits))
    if x.cached_c is None:
        x.cached_c = float(inst.cost.evaluate(x.bits))
    return x.cached_f, x.cached_c


class EvaluationCounter:
    """Counts objective evaluations of solutions not seen before.

    Cache hits are free, so re-reading the parent never consumes budget.
    """

    def __init__(self, inst: Instance):
        self.inst = inst
        self.count = 0

    def __call__(self, x: Solution) -> tuple[float, float]:
        if x.cached_f is None:
            self.count += 1
        return evaluate_cached(self.inst, x)
