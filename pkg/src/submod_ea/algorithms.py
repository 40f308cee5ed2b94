"""Single-objective EAs that grow the feasible region one budget unit at a time.

Both algorithms start from the empty set with working bound ``b_hat = 0``
and raise ``b_hat`` by one per epoch until the real budget is reached.

* :func:`run_one_plus_lambda` -- (1+lambda)-EA: each epoch samples lambda
  offspring of the current parent and keeps the best one that fits ``b_hat``.
* :func:`run_one_plus_one_archive` -- (1+1)-EA that also keeps offspring
  which are too expensive for ``b_hat`` but fit the final budget, and
  promotes the best of them once ``b_hat`` has grown enough.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from .core import (
    ConfigurationError,
    EvaluationCounter,
    Instance,
    RandomSource,
    Solution,
    evaluate_cached,
)
from .mutation import MutationOperator, mutate


@dataclass(frozen=True)
class OnePlusLambdaConfig:
    lambda_: int
    budget_B: int | None = None  # None: use the instance budget
    mutation: MutationOperator = MutationOperator.STANDARD
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mutation", MutationOperator.parse(self.mutation))
        if self.lambda_ < 1:
            raise ConfigurationError(f"lambda must be >= 1, got {self.lambda_}")


@dataclass(frozen=True)
class ArchiveConfig:
    t_max: int
    budget_B: float | None = None  # None: use the instance budget
    mutation: MutationOperator = MutationOperator.STANDARD
    seed: int = 0
    prune_archive: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mutation", MutationOperator.parse(self.mutation))
        if self.t_max < 1:
            raise ConfigurationError(f"t_max must be >= 1, got {self.t_max}")


@dataclass
class RunRecord:
    algorithm: str
    config: dict[str, Any]
    per_epoch_best: list[tuple[float, float, float]]
    evaluations_used: int
    final_solution: Solution
    per_budget_best: dict[float, Solution] = field(default_factory=dict)

    @property
    def final_f(self) -> float:
        return self.final_solution.cached_f

    @property
    def final_c(self) -> float:
        return self.final_solution.cached_c


class Archive:
    """Currently-infeasible offspring that still fit the final budget.

    An offspring ``y`` is rejected when some stored ``z`` has
    ``c(z) <= c(y)`` and ``f(z) > f(y)``.  With ``prune=True`` an accepted
    ``y`` also evicts every entry it weakly dominates; this never changes the
    best entry eligible under any bound, because the evicting entry is
    eligible whenever the evicted one is and is at least as good.
    """

    def __init__(self, prune: bool = True):
        self.prune = prune
        self.entries: list[Solution] = []
        self.peak_size = 0

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def insert(self, y: Solution) -> bool:
        fy, cy = y.cached_f, y.cached_c
        for z in self.entries:
            if z.cached_c <= cy and z.cached_f > fy:
                return False
        if self.prune:
            self.entries = [
                z for z in self.entries if not (cy <= z.cached_c and fy >= z.cached_f)
            ]
        self.entries.append(y)
        self.peak_size = max(self.peak_size, len(self.entries))
        return True

    def purge(self, bound: float):
        """Drop entries with cost at most ``bound``."""
        self.entries = [z for z in self.entries if z.cached_c > bound]

    def best_within(self, bound: float) -> Solution | None:
        """Highest-f entry with cost at most ``bound``; earliest wins ties."""
        best = None
        for z in self.entries:
            if z.cached_c <= bound and (best is None or z.cached_f > best.cached_f):
                best = z
        return best


def archive_insert(a: Archive, y: Solution) -> bool:
    return a.insert(y)


def theorem2_parameters(n: int, r: int) -> tuple[int, int]:
    """``lambda = ceil(2 e n ln n)`` and ``t_max = r * lambda``."""
    if n < 2 or not 1 <= r <= n:
        raise ConfigurationError(f"need n >= 2 and 1 <= r <= n, got n={n}, r={r}")
    lam = math.ceil(2 * math.e * n * math.log(n))
    return lam, r * lam


def theorem3_parameters(n: int, B: int, per_budget: bool = True) -> tuple[int, int]:
    """Epoch length ``ceil(e n ln(n B^2))`` (every bound) or ``ceil(e n ln(n B))``
    (final bound only), and ``t_max = B * t_epoch``."""
    if n < 2 or B < 1:
        raise ConfigurationError(f"need n >= 2 and B >= 1, got n={n}, B={B}")
    arg = n * B * B if per_budget else n * B
    t_epoch = math.ceil(math.e * n * math.log(arg))
    return t_epoch, B * t_epoch


def _is_uniform(inst: Instance) -> bool:
    return bool(getattr(inst.cost, "is_uniform", False))


def run_one_plus_lambda(inst: Instance, cfg: OnePlusLambdaConfig) -> RunRecord:
    B = inst.budget if cfg.budget_B is None else cfg.budget_B
    if B != int(B) or B < 1:
        raise ConfigurationError(f"(1+lambda)-EA needs a positive integer budget, got {B}")
    B = int(B)
    if _is_uniform(inst) and B > inst.n:
        raise ConfigurationError(f"budget {B} exceeds ground-set size {inst.n}")

    rng = RandomSource(cfg.seed)
    evaluate = EvaluationCounter(inst)
    x = Solution.empty(inst.n)
    evaluate_cached(inst, x)
    per_epoch = []
    per_budget = {0: x}
    b_hat = 0
    while b_hat < B:
        b_hat += 1
        best = x
        for _ in range(cfg.lambda_):
            y = mutate(cfg.mutation, x, rng)
            fy, cy = evaluate(y)
            if cy <= b_hat and fy >= best.cached_f:
                best = y
        x = best
        assert x.cached_c <= b_hat
        per_epoch.append((b_hat, x.cached_f, x.cached_c))
        per_budget[b_hat] = x

    return RunRecord(
        algorithm="opla",
        config={"lambda": cfg.lambda_, "B": B, "mutation": cfg.mutation.value, "seed": cfg.seed},
        per_epoch_best=per_epoch,
        evaluations_used=evaluate.count,
        final_solution=x,
        per_budget_best=per_budget,
    )


def run_one_plus_one_archive(inst: Instance, cfg: ArchiveConfig) -> RunRecord:
    B = inst.budget if cfg.budget_B is None else cfg.budget_B
    if not B > 0:
        raise ConfigurationError(f"budget must be positive, got {B}")
    t_epoch = cfg.t_max // math.ceil(B)
    if t_epoch == 0:
        raise ConfigurationError(
            f"t_max={cfg.t_max} leaves no step per epoch for {math.ceil(B)} epochs"
        )

    rng = RandomSource(cfg.seed)
    evaluate = EvaluationCounter(inst)
    archive = Archive(prune=cfg.prune_archive)
    x = Solution.empty(inst.n)
    evaluate_cached(inst, x)
    b_hat = 0
    t = 0
    per_epoch = []
    per_budget = {0: x}

    while b_hat <= B and t < cfg.t_max:
        k = 0
        while k < t_epoch and t < cfg.t_max:
            y = mutate(cfg.mutation, x, rng)
            t += 1
            fy, cy = evaluate(y)
            if b_hat < cy <= B:
                archive.insert(y)
            if cy <= b_hat and fy >= x.cached_f:
                x = y
            k += 1
        per_budget[b_hat] = x
        per_epoch.append((b_hat, x.cached_f, x.cached_c))

        archive.purge(b_hat)
        b_hat = min(b_hat + 1, B)
        cand = archive.best_within(b_hat)
        if cand is not None and cand.cached_f >= x.cached_f:
            x = cand
        assert x.cached_c <= b_hat
        per_budget[b_hat] = x

    return RunRecord(
        algorithm="opoa",
        config={
            "t_max": cfg.t_max,
            "t_epoch": t_epoch,
            "B": B,
            "mutation": cfg.mutation.value,
            "seed": cfg.seed,
            "archive_peak": archive.peak_size,
        },
        per_epoch_best=per_epoch,
        evaluations_used=evaluate.count,
        final_solution=x,
        per_budget_best=per_budget,
    )
