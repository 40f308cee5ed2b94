"""Experiment grid execution and table rendering."""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .algorithms import (
    ArchiveConfig,
    OnePlusLambdaConfig,
    run_one_plus_lambda,
    run_one_plus_one_archive,
)
from .analysis import ComparisonRow, rank_sum_test, summarize
from .baselines import greedy, run_gsemo
from .core import ContractError, Instance, RandomSource
from .ingest import read_graph
from .mutation import MutationOperator
from .problems import budget_grid, coverage_instance, make_random_costs, uniform_cost

log = logging.getLogger(__name__)

ALGORITHMS = ("opoa", "opla", "gsemo", "greedy")
ALGORITHM_LABELS = {
    "opoa": "(1+1) EA archive",
    "opla": "(1+lambda)-EA",
    "gsemo": "GSEMO",
    "greedy": "Greedy",
}
DEFAULT_TMAX = (100_000, 500_000, 1_000_000)
COST_STREAM = 1


class InvariantBreach(RuntimeError):
    pass


class GeneralCostWarning(UserWarning):
    """The (1+lambda)-EA carries no guarantee under non-uniform costs."""


@dataclass
class ExperimentPlan:
    graphs: list[str]
    cost: str = "uniform"
    budgets: list[float] | None = None  # None: budget_grid(n)
    t_max: list[int] = field(default_factory=lambda: list(DEFAULT_TMAX))
    repetitions: int = 30
    algorithms: tuple[str, ...] = ("opoa", "opla")
    base_seed: int = 0
    mutation: MutationOperator = MutationOperator.PLUS
    jobs: int = 1

    def __post_init__(self):
        self.mutation = MutationOperator.parse(self.mutation)
        if self.cost not in ("uniform", "random"):
            raise ContractError(f"cost mode must be uniform or random, got {self.cost!r}")
        if self.repetitions < 1:
            raise ContractError("repetitions must be >= 1")
        if not self.graphs:
            raise ContractError("plan needs at least one graph")
        if not self.t_max:
            raise ContractError("plan needs at least one t_max value")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ContractError(f"unknown algorithms: {sorted(unknown)}")
        self.algorithms = tuple(a for a in ALGORITHMS if a in self.algorithms)
        if self.budgets is not None:
            if any(not b > 0 for b in self.budgets):
                raise ContractError("budgets must be positive")
            self._check_tmax(self.budgets)

    def _check_tmax(self, budgets):
        need = math.ceil(max(budgets))
        low = [t for t in self.t_max if t < need]
        if low:
            raise ContractError(f"t_max values {low} are below ceil(max budget) = {need}")


@dataclass(frozen=True)
class RunResult:
    graph: str
    algorithm: str
    B: float
    t_max: int
    seed: int
    final_f: float
    final_c: float
    evaluations: int


@dataclass
class StatsTable:
    cost: str
    algorithms: tuple[str, ...]
    rows: list[ComparisonRow]
    runs: list[RunResult]
    cost_digest: dict[str, str] = field(default_factory=dict)


def build_instance(data, cost_mode: str, base_seed: int) -> Instance:
    """Instance with a placeholder budget; the random cost vector depends only
    on the graph size and base seed, so every cell of a plan shares it."""
    if cost_mode == "uniform":
        cost = uniform_cost(data.n)
    else:
        cost = make_random_costs(data.n, RandomSource(base_seed, stream=COST_STREAM))
    return coverage_instance(data, 1, cost)


def _execute(inst: Instance, algo: str, B: float, t_max: int, seed: int, mutation) -> RunResult:
    inst = inst.with_budget(B)
    if algo == "opla":
        lam = t_max // int(B)
        rec = run_one_plus_lambda(inst, OnePlusLambdaConfig(lam, int(B), mutation, seed))
    elif algo == "opoa":
        rec = run_one_plus_one_archive(inst, ArchiveConfig(t_max, B, mutation, seed))
    elif algo == "gsemo":
        rec = run_gsemo(inst, t_max, seed, mutation)
    else:
        sol = greedy(inst)
        return RunResult(inst.name, algo, B, t_max, seed, sol.cached_f, sol.cached_c, 0)
    if rec.evaluations_used > t_max:
        raise InvariantBreach(
            f"{algo} used {rec.evaluations_used} evaluations with t_max={t_max}"
        )
    if rec.final_c > B:
        raise InvariantBreach(f"{algo} returned cost {rec.final_c} above budget {B}")
    return RunResult(inst.name, algo, B, t_max, seed, rec.final_f, rec.final_c, rec.evaluations_used)


_WORKER_INSTANCE: Instance | None = None


def _init_worker(inst):
    global _WORKER_INSTANCE
    _WORKER_INSTANCE = inst


def _execute_in_worker(task):
    return _execute(_WORKER_INSTANCE, *task)


def _cost_digest(inst: Instance) -> str:
    return hashlib.sha256(inst.cost.weights.tobytes()).hexdigest()[:16]


def run_experiment(plan: ExperimentPlan) -> StatsTable:
    runs: list[RunResult] = []
    digests = {}
    for path in plan.graphs:
        graph = read_graph(path)
        data = graph.data
        log.info("loaded %s: n=%d, %d edges", data.graph_name, data.n, graph.edge_count)
        budgets = plan.budgets if plan.budgets is not None else budget_grid(data.n)
        plan._check_tmax(budgets)
        inst = build_instance(data, plan.cost, plan.base_seed)
        digests[data.graph_name] = _cost_digest(inst)
        if plan.cost == "random" and "opla" in plan.algorithms:
            warnings.warn(
                "the (1+lambda)-EA has no guarantee under non-uniform costs and can "
                "need exponential time on knapsack-type instances",
                GeneralCostWarning,
                stacklevel=2,
            )
        tasks = []
        for B in budgets:
            for t_max in plan.t_max:
                for algo in plan.algorithms:
                    reps = 1 if algo == "greedy" else plan.repetitions
                    for r in range(reps):
                        tasks.append((algo, B, t_max, plan.base_seed + r, plan.mutation))
        if plan.jobs > 1:
            with ProcessPoolExecutor(plan.jobs, initializer=_init_worker, initargs=(inst,)) as ex:
                results = list(ex.map(_execute_in_worker, tasks, chunksize=4))
        else:
            results = [_execute(inst, *t) for t in tasks]
        for res in results:
            if res.algorithm == "greedy":
                # deterministic: one evaluation stands for every repetition
                runs.extend(
                    RunResult(res.graph, "greedy", res.B, res.t_max, plan.base_seed + r,
                              res.final_f, res.final_c, 0)
                    for r in range(plan.repetitions)
                )
            else:
                runs.append(res)
    return StatsTable(plan.cost, plan.algorithms, aggregate(runs, plan.algorithms), runs, digests)


def aggregate(runs: list[RunResult], algorithms) -> list[ComparisonRow]:
    cells: dict[tuple, dict[str, list[float]]] = {}
    for r in runs:
        cells.setdefault((r.graph, r.B, r.t_max), {}).setdefault(r.algorithm, []).append(r.final_f)
    rows = []
    for key in sorted(cells):
        per_algo = cells[key]
        stats = tuple((a, *summarize(per_algo[a])) for a in algorithms if a in per_algo)
        p = None
        if "opoa" in per_algo and "opla" in per_algo and min(len(per_algo["opoa"]), len(per_algo["opla"])) > 1:
            p = rank_sum_test(per_algo["opoa"], per_algo["opla"])
        rows.append(ComparisonRow(key[0], key[1], key[2], stats, p))
    return rows


def _fmt_budget(b: float) -> str:
    return str(int(b)) if float(b).is_integer() else f"{b:g}"


def _table_cells(table: StatsTable, labels: bool) -> tuple[list[str], list[list[str]]]:
    header = ["Graph", "B", "t_max"]
    for a in table.algorithms:
        name = ALGORITHM_LABELS[a] if labels else a
        header += [f"{name} Mean", f"{name} Std"]
    show_p = any(r.p_value is not None for r in table.rows)
    if show_p:
        header.append("p-value")
    body = []
    for r in table.rows:
        line = [r.graph_name, _fmt_budget(r.B), str(r.t_max)]
        for a in table.algorithms:
            mean, std = r.cell(a)
            line += [f"{mean:.0f}", f"{std:.3f}"]
        if show_p:
            line.append("" if r.p_value is None else f"{r.p_value:.3f}")
        body.append(line)
    return header, body


def emit_table(table: StatsTable, format: str = "text") -> str:
    """Render rows in the column order Graph, B, t_max, per-algorithm
    Mean/Std, p-value.  Means are rounded to integers, stds and p-values to
    three decimals."""
    if not table.rows:
        raise ContractError("cannot render an empty table")
    header, body = _table_cells(table, labels=format != "csv")
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(body)
        return buf.getvalue()
    if format == "markdown":
        out = ["| " + " | ".join(header) + " |",
               "|" + "|".join("---" if i == 0 else "---:" for i in range(len(header))) + "|"]
        out += ["| " + " | ".join(line) + " |" for line in body]
        return "\n".join(out) + "\n"
    if format == "text":
        widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
        fmt = lambda row: "  ".join(  # noqa: E731
            c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))
        ).rstrip()
        title = f"cost: {table.cost}"
        return "\n".join([title, fmt(header), *(fmt(r) for r in body)]) + "\n"
    raise ValueError(f"unknown format {format!r}")


def dump_runs(runs: list[RunResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed", "algorithm", "graph", "B", "t_max", "final_f", "final_c", "evaluations"])
    for r in sorted(runs, key=lambda r: (r.graph, r.B, r.t_max, r.algorithm, r.seed)):
        w.writerow([r.seed, r.algorithm, r.graph, _fmt_budget(r.B), r.t_max,
                    repr(r.final_f), repr(r.final_c), r.evaluations])
    return buf.getvalue()


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("SUBMOD_EA_JOBS", "1")))
    except ValueError:
        return 1
