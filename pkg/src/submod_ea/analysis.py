"""Exhaustive property checks for set functions and run statistics."""
from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import ContractError, ObjectiveFunction, Solution

RATIO_MAX_N = 14
PROPERTY_MAX_N = 12
EXACT_RANK_SUM_MAX = 20


class MonotonicityWarning(UserWarning):
    pass


def _popcount(masks: np.ndarray) -> np.ndarray:
    m = masks.astype(np.uint64)
    out = np.zeros(m.shape, dtype=np.int64)
    while np.any(m):
        out += (m & np.uint64(1)).astype(np.int64)
        m >>= np.uint64(1)
    return out


def _mask_to_indices(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)


def value_table(obj: ObjectiveFunction) -> np.ndarray:
    """``f`` on every subset; entry ``m`` is the set of bits set in ``m``."""
    n = obj.n
    codes = np.arange(1 << n, dtype=np.int64)
    rows = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    return obj.evaluate_batch(rows)


def gain_table(values: np.ndarray, n: int) -> np.ndarray:
    """``G[S, v] = f(S + v) - f(S)``, zero where ``v`` is already in ``S``."""
    codes = np.arange(len(values), dtype=np.int64)
    G = np.zeros((len(values), n))
    for v in range(n):
        bit = 1 << v
        out = (codes & bit) == 0
        G[out, v] = values[codes[out] | bit] - values[codes[out]]
    return G


@dataclass
class SubmodularityReport:
    alpha_f: float | None
    witness: tuple[tuple[int, ...], tuple[int, ...], int] | None
    pairs_checked: int
    unbounded_pairs: int = 0


def submodularity_ratio(obj: ObjectiveFunction, max_n: int = RATIO_MAX_N) -> SubmodularityReport:
    """Exact minimum of ``(f(X+v) - f(X)) / (f(Y+v) - f(Y))`` over
    ``X ⊆ Y``, ``v ∉ Y`` with a positive denominator.

    For each ``v`` the smallest numerator over all subsets of ``Y`` comes from
    a subset-minimum (SOS) sweep, so the cost is ``O(n^2 2^n)`` rather than a
    walk over all ``3^n`` nested pairs.  Pairs with a zero denominator carry
    no constraint and are skipped; those with a positive numerator are
    counted in ``unbounded_pairs``.
    """
    n = obj.n
    if n > max_n:
        raise ContractError(f"submodularity ratio enumeration refuses n={n} > {max_n}")
    F = value_table(obj)
    size = 1 << n
    codes = np.arange(size, dtype=np.int64)
    sizes = _popcount(codes)
    best = None
    pairs = 0
    unbounded = 0
    for v in range(n):
        bit = 1 << v
        out = (codes & bit) == 0
        g = np.full(size, np.inf)
        g[out] = F[codes[out] | bit] - F[codes[out]]
        low = g.copy()
        arg = codes.copy()
        for i in range(n):
            lo = low.reshape(-1, 2, 1 << i)
            ar = arg.reshape(-1, 2, 1 << i)
            take = lo[:, 0, :] < lo[:, 1, :]
            lo[:, 1, :] = np.where(take, lo[:, 0, :], lo[:, 1, :])
            ar[:, 1, :] = np.where(take, ar[:, 0, :], ar[:, 1, :])
        valid = out & (g > 0)
        pairs += int((1 << sizes[valid]).sum())
        zero_den = out & (g == 0)
        if zero_den.any():
            # count nested X with positive numerator under a zero denominator
            cnt = (out & (g > 0)).astype(np.int64)
            for i in range(n):
                c3 = cnt.reshape(-1, 2, 1 << i)
                c3[:, 1, :] += c3[:, 0, :]
            unbounded += int(cnt[zero_den].sum())
        if not valid.any():
            continue
        ratios = np.where(valid, low / np.where(valid, g, 1.0), np.inf)
        Y = int(np.argmin(ratios))
        r = float(ratios[Y])
        if best is None or r < best[0]:
            best = (r, int(arg[Y]), Y, v)
    if best is None:
        return SubmodularityReport(None, None, pairs, unbounded)
    r, X, Y, v = best
    return SubmodularityReport(
        r, (_mask_to_indices(X, n), _mask_to_indices(Y, n), v), pairs, unbounded
    )


@dataclass
class PropertyReport:
    """Violation counts from :func:`check_submodular_properties`."""

    n: int
    monotone: int = 0
    lattice: int = 0
    diminishing_returns: int = 0
    gain_sum_bound: int = 0
    lemma_delta: int = 0
    checked: dict[str, int] = field(default_factory=dict)

    @property
    def total_violations(self) -> int:
        return (self.monotone + self.lattice + self.diminishing_returns
                + self.gain_sum_bound + self.lemma_delta)


def check_submodular_properties(obj: ObjectiveFunction, max_n: int = PROPERTY_MAX_N) -> PropertyReport:
    """Check, over every pair of subsets:

    * monotone: ``f(A) <= f(B)`` for ``A ⊆ B``
    * lattice: ``f(A∪B) + f(A∩B) <= f(A) + f(B)``
    * diminishing_returns: gain of ``x`` at ``A`` >= gain at ``B`` for ``A ⊆ B``, ``x ∉ B``
    * gain_sum_bound: ``f(B) <= f(A) + sum of gains at A over B \\ A`` for ``A ⊆ B``
    * lemma_delta: ``f(X*) <= f(X) + |X*| * max gain at X over X* \\ X``

    Comparisons are exact; integer-valued functions need no tolerance.
    """
    n = obj.n
    if n > max_n:
        raise ContractError(f"exhaustive property check refuses n={n} > {max_n}")
    F = value_table(obj)
    G = gain_table(F, n)
    size = 1 << n
    codes = np.arange(size, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    card = bits.sum(axis=1)
    rep = PropertyReport(n)
    counts = defaultdict(int)
    for a in range(size):
        fa = F[a]
        sup = (codes & a) == a
        counts["lattice"] += size
        rep.lattice += int(np.count_nonzero(F[codes | a] + F[codes & a] > fa + F))
        counts["monotone"] += int(sup.sum())
        rep.monotone += int(np.count_nonzero(F[sup] < fa))

        Gs = G[sup]
        outside = ~bits[sup]
        counts["diminishing_returns"] += int(outside.sum())
        rep.diminishing_returns += int(np.count_nonzero(outside & (G[a] < Gs)))
        counts["gain_sum_bound"] += int(sup.sum())
        rep.gain_sum_bound += int(np.count_nonzero(F[sup] > fa + bits[sup] @ G[a]))

        fresh = bits & ~bits[a]
        delta = np.where(fresh, G[a], -np.inf).max(axis=1)
        delta = np.where(np.isfinite(delta), delta, 0.0)
        counts["lemma_delta"] += size
        rep.lemma_delta += int(np.count_nonzero(F > fa + card * delta))
    rep.checked = dict(counts)
    return rep


def check_lemma_delta(obj: ObjectiveFunction, x_star: Solution, x: Solution) -> tuple[bool, float]:
    """Test ``f(X*) <= f(X) + r * delta`` with ``r = |X*|`` and ``delta`` the
    largest single-element gain at ``X`` over ``X* \\ X``.

    Returns ``(holds, slack)`` where ``slack = f(X) + r * delta - f(X*)``.
    """
    fx = obj.evaluate(x.bits)
    fs = obj.evaluate(x_star.bits)
    missing = np.flatnonzero(x_star.bits & ~x.bits)
    r = int(x_star.bits.sum())
    delta = 0.0
    for i in missing:
        bits = x.bits.copy()
        bits[i] = True
        delta = max(delta, obj.evaluate(bits) - fx)
    if missing.size == 0 and fs > fx:
        warnings.warn(
            f"X* ⊆ X but f(X*)={fs} > f(X)={fx}: objective is not monotone",
            MonotonicityWarning,
            stacklevel=2,
        )
    slack = fx + r * delta - fs
    return slack >= 0, slack


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _exact_two_sided(doubled: list[int], n1: int, observed: int) -> float:
    # Permutation distribution of the doubled rank sum of a size-n1 subset.
    dist: list[dict[int, int]] = [defaultdict(int) for _ in range(n1 + 1)]
    dist[0][0] = 1
    for r in doubled:
        for k in range(n1, 0, -1):
            for s, cnt in dist[k - 1].items():
                dist[k][s + r] += cnt
    N = len(doubled)
    center = n1 * (N + 1)  # doubled mean rank sum
    dev = abs(observed - center)
    hits = sum(cnt for s, cnt in dist[n1].items() if abs(s - center) >= dev)
    return min(1.0, hits / math.comb(N, n1))


def rank_sum_test(samples_a: Sequence[float], samples_b: Sequence[float], method: str = "auto") -> float:
    """Two-sided Mann-Whitney U p-value.

    ``method="exact"`` enumerates the permutation distribution of the rank
    sum (ties handled through midranks); ``"asymptotic"`` uses the normal
    approximation with tie and continuity corrections.  ``"auto"`` picks exact
    when the combined size is at most 20.
    """
    a = [float(v) for v in samples_a]
    b = [float(v) for v in samples_b]
    if not a or not b:
        raise ContractError("rank_sum_test needs two non-empty samples")
    n1, n2 = len(a), len(b)
    N = n1 + n2
    if len(set(a + b)) == 1:
        return 1.0
    if method == "auto":
        method = "exact" if N <= EXACT_RANK_SUM_MAX else "asymptotic"
    ranks = _midranks(a + b)
    if method == "exact":
        doubled = [int(round(2 * r)) for r in ranks]
        return _exact_two_sided(doubled, n1, sum(doubled[:n1]))
    if method != "asymptotic":
        raise ValueError(f"unknown method {method!r}")
    u1 = sum(ranks[:n1]) - n1 * (n1 + 1) / 2
    mu = n1 * n2 / 2
    ties = defaultdict(int)
    for v in a + b:
        ties[v] += 1
    tie_term = sum(t**3 - t for t in ties.values()) / (N * (N - 1))
    var = n1 * n2 / 12 * ((N + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = max(abs(u1 - mu) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2)))


def _final_value(r) -> float:
    return float(r.final_f) if hasattr(r, "final_f") else float(r)


def summarize(records: Iterable) -> tuple[float, float]:
    """Mean and sample standard deviation of final objective values."""
    vals = [_final_value(r) for r in records]
    if not vals:
        raise ContractError("summarize needs at least one record")
    mean = math.fsum(vals) / len(vals)
    if len(vals) == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return mean, math.sqrt(var)


@dataclass(frozen=True)
class ComparisonRow:
    """One table row; ``cells`` maps algorithm id to ``(mean, std)``."""

    graph_name: str
    B: float
    t_max: int
    cells: tuple[tuple[str, float, float], ...]
    p_value: float | None = None

    def __post_init__(self):
        for algo, _, std in self.cells:
            if std < 0:
                raise ContractError(f"negative std for {algo}")
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ContractError(f"p-value {self.p_value} outside [0, 1]")

    def cell(self, algo: str) -> tuple[float, float]:
        for name, mean, std in self.cells:
            if name == algo:
                return mean, std
        raise KeyError(algo)
