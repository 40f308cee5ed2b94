"""Reference optimizers: cost-benefit greedy, exhaustive search and GSEMO."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algorithms import RunRecord
from .core import (
    ContractError,
    EvaluationCounter,
    Instance,
    RandomSource,
    Solution,
    evaluate_cached,
)
from .mutation import MutationOperator, mutate

BRUTE_FORCE_MAX_N = 24
_CHUNK = 1 << 15


@dataclass
class OracleResult:
    per_budget_opt: dict[float, tuple[float, Solution]]
    enumerated_count: int

    def opt(self, budget: float) -> float:
        return self.per_budget_opt[budget][0]


def greedy(inst: Instance) -> Solution:
    """Cost-benefit greedy, then the better of that set and the best
    affordable singleton.

    Each step adds the affordable element with the largest gain per unit of
    added cost; the lowest index wins ties.
    """
    n, B = inst.n, inst.budget
    f, c = inst.objective, inst.cost
    x = np.zeros(n, dtype=bool)
    fx, cx = f.evaluate(x), c.evaluate(x)

    best_single = None
    for v in range(n):
        e = np.zeros(n, dtype=bool)
        e[v] = True
        cv = c.evaluate(e)
        if cv <= B:
            fv = f.evaluate(e)
            if best_single is None or fv > best_single[0]:
                best_single = (fv, e)

    while True:
        pick = None
        for v in np.flatnonzero(~x):
            x[v] = True
            cy = c.evaluate(x)
            if cy <= B:
                dc = cy - cx
                if dc <= 0:
                    raise ContractError(f"element {v} adds no cost; gain-per-cost undefined")
                fy = f.evaluate(x)
                ratio = (fy - fx) / dc
                if pick is None or ratio > pick[0]:
                    pick = (ratio, v, fy, cy)
            x[v] = False
        if pick is None:
            break
        _, v, fx, cx = pick
        x[v] = True

    if best_single is not None and best_single[0] > fx:
        x = best_single[1]
    sol = Solution(x)
    evaluate_cached(inst, sol)
    return sol


def _subset_rows(start: int, stop: int, n: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(bool)


def brute_force(inst: Instance, budgets) -> OracleResult:
    """Exact optimum for each budget by enumerating all 2^n subsets.

    Among optimal subsets the witness is the lexicographically smallest bit
    string, reading element 0 as the first character.
    """
    n = inst.n
    if n > BRUTE_FORCE_MAX_N:
        raise ContractError(
            f"brute force refuses n={n}; enumeration is capped at n={BRUTE_FORCE_MAX_N}"
        )
    budgets = list(budgets)
    best_f = np.full(len(budgets), -np.inf)
    best_key = [None] * len(budgets)
    bud = np.asarray(budgets, dtype=np.float64)
    total = 1 << n
    # lexicographic key of a subset code: the bit-reversal of its element mask
    weights_rev = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)
    for start in range(0, total, _CHUNK):
        rows = _subset_rows(start, min(total, start + _CHUNK), n)
        fv = inst.objective.evaluate_batch(rows)
        cv = inst.cost.evaluate_batch(rows)
        keys = rows.astype(np.int64) @ weights_rev
        for j, b in enumerate(bud):
            ok = cv <= b
            if not ok.any():
                continue
            fm = np.where(ok, fv, -np.inf)
            top = fm.max()
            if top < best_f[j]:
                continue
            k = int(keys[fm == top].min())
            if top > best_f[j] or k < best_key[j]:
                best_f[j] = top
                best_key[j] = k
    result = {}
    for j, b in enumerate(budgets):
        if best_key[j] is None:
            raise ContractError(f"no subset fits budget {b}")
        bits = [(best_key[j] >> (n - 1 - i)) & 1 for i in range(n)]
        sol = Solution(bits)
        evaluate_cached(inst, sol)
        result[b] = (float(best_f[j]), sol)
    return OracleResult(result, total)


def _dominates_weakly(a, b) -> bool:
    return a[0] >= b[0] and a[1] <= b[1]


def run_gsemo(
    inst: Instance,
    t_max: int,
    seed: int,
    mutation: MutationOperator = MutationOperator.STANDARD,
) -> RunRecord:
    """Reference implementation of the GSEMO comparison baseline.

    Objectives are ``(g, c)`` with ``g = f`` when ``c <= B`` and ``-1``
    otherwise; ``g`` is maximized and ``c`` minimized.  An offspring joins the
    population unless strictly dominated and evicts everything it weakly
    dominates.
    """
    B = inst.budget
    rng = RandomSource(seed)
    mutation = MutationOperator.parse(mutation)
    evaluate = EvaluationCounter(inst)

    def objectives(s):
        f, c = s.cached_f, s.cached_c
        return (f if c <= B else -1.0, c)

    x0 = Solution.empty(inst.n)
    evaluate_cached(inst, x0)
    pop = [(x0, objectives(x0))]
    for _ in range(t_max):
        parent = pop[rng.integers(len(pop))][0]
        y = mutate(mutation, parent, rng)
        evaluate(y)
        oy = objectives(y)
        if any(_dominates_weakly(oz, oy) and oz != oy for _, oz in pop):
            continue
        pop = [(z, oz) for z, oz in pop if not _dominates_weakly(oy, oz)]
        pop.append((y, oy))

    best = None
    for z, oz in pop:
        if z.cached_c <= B and (best is None or z.cached_f > best.cached_f):
            best = z
    return RunRecord(
        algorithm="gsemo",
        config={"t_max": t_max, "B": B, "mutation": mutation.value, "seed": seed},
        per_epoch_best=[(B, best.cached_f, best.cached_c)],
        evaluations_used=evaluate.count,
        final_solution=best,
        per_budget_best={B: best},
    )
