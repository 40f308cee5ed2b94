"""Concrete objectives and costs: graph max coverage, linear costs, and the
knapsack instance on which the (1+lambda)-EA gets stuck."""
from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import ContractError, CostFunction, Instance, ObjectiveFunction, RandomSource

MAX_EXACT_INT = 2**53


@dataclass(frozen=True)
class CoverageInstanceData:
    """Undirected simple graph stored as sorted per-node neighbor lists."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    graph_name: str = ""

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ContractError("adjacency must have one entry per node")
        for u, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ContractError(f"neighbors of node {u} must be sorted and unique")
            for v in nbrs:
                if not 0 <= v < self.n:
                    raise ContractError(f"neighbor {v} of node {u} out of range")
                if v == u:
                    raise ContractError(f"self-loop on node {u}")
                row = self.adjacency[v]
                k = bisect.bisect_left(row, u)
                if k == len(row) or row[k] != u:
                    raise ContractError(f"edge {u}-{v} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges, graph_name: str = "") -> "CoverageInstanceData":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                continue
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs), graph_name)

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2


class CoverageObjective(ObjectiveFunction):
    """Closed-neighborhood coverage ``f(X) = |X ∪ N(X)|``."""

    def __init__(self, data: CoverageInstanceData):
        self.data = data
        self.n = data.n
        indptr = [0]
        indices: list[int] = []
        for u, nbrs in enumerate(data.adjacency):
            row = sorted((u, *nbrs))
            indices.extend(row)
            indptr.append(len(indices))
        self._indptr = np.asarray(indptr, dtype=np.int64)
        self._indices = np.asarray(indices, dtype=np.int64)
        self._dense = None
        # Closed neighborhoods as Python int bit sets: OR + popcount is the
        # fastest route for small selections on graphs of moderate size.
        self._masks = None
        if self.n <= self.MASK_MAX_N:
            self._masks = [
                sum(1 << int(v) for v in self._indices[indptr[u]:indptr[u + 1]])
                for u in range(self.n)
            ]

    MASK_MAX_N = 8192
    MASK_MAX_SELECTED = 64

    def evaluate(self, bits: np.ndarray) -> float:
        sel = np.flatnonzero(bits)
        if sel.size == 0:
            return 0.0
        if self._masks is not None and sel.size <= self.MASK_MAX_SELECTED:
            m = 0
            for i in sel.tolist():
                m |= self._masks[i]
            return float(m.bit_count())
        starts = self._indptr[sel]
        lens = self._indptr[sel + 1] - starts
        total = int(lens.sum())
        # ragged gather of the selected CSR rows
        offs = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(total)
        covered = np.zeros(self.n, dtype=bool)
        covered[self._indices[offs]] = True
        return float(np.count_nonzero(covered))

    def closed_neighborhood_matrix(self) -> np.ndarray:
        if self._dense is None:
            m = np.zeros((self.n, self.n), dtype=np.int32)
            for u in range(self.n):
                m[u, self._indices[self._indptr[u]:self._indptr[u + 1]]] = 1
            self._dense = m
        return self._dense

    def evaluate_batch(self, rows: np.ndarray) -> np.ndarray:
        if self.n > 4096:
            return super().evaluate_batch(rows)
        m = self.closed_neighborhood_matrix()
        hit = rows.astype(np.int32) @ m
        return np.count_nonzero(hit, axis=1).astype(np.float64)


class RestrictedObjective(ObjectiveFunction):
    """View of ``base`` whose ground set is the listed elements only.

    Restricting the ground set preserves monotonicity and submodularity, so
    exhaustive property checks can run on a sample of a large instance.
    """

    def __init__(self, base: ObjectiveFunction, elements):
        self.base = base
        self.elements = np.asarray(list(elements), dtype=np.int64)
        self.n = len(self.elements)

    def _lift(self, bits):
        full = np.zeros(self.base.n, dtype=bool)
        full[self.elements[np.asarray(bits, dtype=bool)]] = True
        return full

    def evaluate(self, bits: np.ndarray) -> float:
        return self.base.evaluate(self._lift(bits))

    def evaluate_batch(self, rows: np.ndarray) -> np.ndarray:
        full = np.zeros((rows.shape[0], self.base.n), dtype=bool)
        full[:, self.elements] = rows
        return self.base.evaluate_batch(full)


class LinearObjective(ObjectiveFunction):
    """``f(X) = sum of values[i] for i in X``."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)
        if np.any(self.values < 0):
            raise ContractError("linear objective values must be non-negative")
        self.n = len(self.values)

    def evaluate(self, bits: np.ndarray) -> float:
        return float(self.values[bits].sum())

    def evaluate_batch(self, rows: np.ndarray) -> np.ndarray:
        return rows.astype(np.float64) @ self.values


class LinearCost(CostFunction):
    """Additive cost with strictly positive weights; all ones gives |X|."""

    def __init__(self, weights):
        self.weights = np.asarray(weights, dtype=np.float64)
        if self.weights.ndim != 1 or len(self.weights) == 0:
            raise ContractError("weights must be a non-empty vector")
        if not np.all(self.weights > 0):
            raise ContractError("all cost weights must be positive")
        self.n = len(self.weights)
        self.min_increment = float(self.weights.min())
        self.is_uniform = bool(np.all(self.weights == 1.0))

    def evaluate(self, bits: np.ndarray) -> float:
        if self.is_uniform:
            return float(np.count_nonzero(bits))
        return float(self.weights[bits].sum())

    def evaluate_batch(self, rows: np.ndarray) -> np.ndarray:
        return rows.astype(np.float64) @ self.weights


def uniform_cost(n: int) -> LinearCost:
    return LinearCost(np.ones(n))


def make_random_costs(n: int, rng: RandomSource) -> LinearCost:
    """Independent uniform weights in [0.5, 1.5]."""
    if n < 1:
        raise ContractError("n must be at least 1")
    return LinearCost(rng.uniform(0.5, 1.5, size=n))


def coverage_instance(data: CoverageInstanceData, budget: float, cost: CostFunction | None = None) -> Instance:
    cost = uniform_cost(data.n) if cost is None else cost
    return Instance(CoverageObjective(data), cost, budget, data.graph_name)


def random_graph(n: int, p: float, rng: RandomSource, name: str = "") -> CoverageInstanceData:
    """Erdős–Rényi G(n, p)."""
    edges = []
    for u in range(n):
        draws = rng.random(n - u - 1)
        edges.extend((u, u + 1 + int(k)) for k in np.flatnonzero(draws < p))
    return CoverageInstanceData.from_edges(n, edges, name or f"gnp-{n}-{p}")


@dataclass(frozen=True)
class KnapsackCounterexample:
    """Items ``0..n-2`` have weight 1 and profit 1; the last item has weight
    ``n-1`` and profit ``L``.  Budget ``n-1`` makes the last item alone optimal."""

    n: int
    L: float | None = None

    def __post_init__(self):
        if self.n < 3:
            raise ContractError("counterexample needs n >= 3")
        if self.L is None:
            object.__setattr__(self, "L", float(min(2**self.n, MAX_EXACT_INT)))

    @property
    def budget(self) -> int:
        return self.n - 1

    def profits(self) -> np.ndarray:
        p = np.ones(self.n)
        p[-1] = self.L
        return p

    def weights(self) -> np.ndarray:
        w = np.ones(self.n)
        w[-1] = self.n - 1
        return w

    def instance(self) -> Instance:
        return Instance(
            LinearObjective(self.profits()),
            LinearCost(self.weights()),
            self.budget,
            f"knapsack-counterexample-{self.n}",
        )


def knapsack_objective(kc: KnapsackCounterexample, x) -> float:
    bits = getattr(x, "bits", x)
    if len(bits) != kc.n:
        raise ContractError(f"solution has length {len(bits)}, expected {kc.n}")
    return float(kc.profits()[np.asarray(bits, dtype=bool)].sum())


def budget_grid(n: int) -> list[int]:
    """``[floor(log2 n), floor(sqrt n), floor(n/20), floor(n/10)]``."""
    if n < 1:
        raise ContractError("n must be positive")
    grid = [n.bit_length() - 1, math.isqrt(n), n // 20, n // 10]
    if n < 20 or len(set(grid)) < 4 or min(grid) < 1:
        warnings.warn(f"budget grid for n={n} is degenerate: {grid}", stacklevel=2)
    return grid
