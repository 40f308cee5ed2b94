"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 input parse error, 3 internal
invariant breach.
"""
from __future__ import annotations

import argparse
import logging
import sys
import warnings

import numpy as np

from . import __version__
from .algorithms import (
    ArchiveConfig,
    OnePlusLambdaConfig,
    run_one_plus_lambda,
    run_one_plus_one_archive,
    theorem3_parameters,
)
from .analysis import check_submodular_properties, submodularity_ratio, PROPERTY_MAX_N, RATIO_MAX_N
from .baselines import brute_force
from .core import ConfigurationError, ContractError, RandomSource
from .harness import (
    ExperimentPlan,
    InvariantBreach,
    build_instance,
    default_jobs,
    dump_runs,
    emit_table,
    run_experiment,
)
from .ingest import GraphParseError, read_graph
from .problems import CoverageObjective, KnapsackCounterexample, RestrictedObjective

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_BREACH = 0, 1, 2, 3

PLAN_KEYS = {"graph", "cost", "budgets", "tmax", "reps", "seed", "algos",
             "mutation", "format", "out", "dump", "jobs"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number_list(text: str) -> list:
    out = []
    for tok in text.replace(";", ",").split(","):
        tok = tok.strip()
        if not tok:
            continue
        v = float(tok)
        out.append(int(v) if v.is_integer() else v)
    return out


def read_plan_file(path) -> dict[str, str]:
    """``key = value`` per line; ``#`` starts a comment.  Keys mirror the
    long flags of ``run`` (``graph`` may repeat)."""
    plan: dict[str, str | list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            if "=" not in s:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (p.strip() for p in s.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in PLAN_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown plan key {key!r}")
            if key == "graph":
                plan.setdefault("graph", []).append(value)
            else:
                plan[key] = value
    return plan


def _add_common(p):
    p.add_argument("--graph", action="append", help="edge-list or MatrixMarket file (repeatable)")
    p.add_argument("--cost", choices=["uniform", "random"])
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="submod-ea", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment grid and print the comparison table")
    _add_common(run)
    run.add_argument("--plan", help="key = value plan file; flags override it")
    run.add_argument("--budgets", help="comma list or 'auto'")
    run.add_argument("--tmax", help="comma list of evaluation budgets")
    run.add_argument("--reps", type=int)
    run.add_argument("--algos", help="comma list from opoa,opla,gsemo,greedy")
    run.add_argument("--mutation", choices=["standard", "plus"])
    run.add_argument("--format", choices=["csv", "text", "markdown"])
    run.add_argument("--out")
    run.add_argument("--dump", help="write one line per run to this file")
    run.add_argument("--jobs", type=int)

    oracle = sub.add_parser("oracle", help="exact optima by enumeration (n <= 24)")
    _add_common(oracle)
    oracle.add_argument("--budgets", required=True)

    check = sub.add_parser("check", help="exhaustive submodularity and gain-bound checks")
    _add_common(check)
    check.add_argument("--sample", type=int,
                       help=f"restrict the ground set to this many random nodes (default: all, n <= {PROPERTY_MAX_N})")

    cx = sub.add_parser("counterexample", help="knapsack instance separating the two EAs")
    cx.add_argument("--n", type=int, default=12)
    cx.add_argument("--L", type=float)
    cx.add_argument("--runs", type=int, default=100)
    cx.add_argument("--seed", type=int, default=0)
    cx.add_argument("--mutation", choices=["standard", "plus"], default="standard")
    return parser


def _resolve(args, plan, key, flag=None, default=None):
    v = getattr(args, flag or key, None)
    if v is not None:
        return v
    return plan.get(key, default)


def cmd_run(args) -> int:
    plan_kv = read_plan_file(args.plan) if args.plan else {}
    graphs = args.graph or plan_kv.get("graph") or []
    if not graphs:
        raise UsageError("run needs --graph (or graph = ... in the plan file)")
    budgets = _resolve(args, plan_kv, "budgets", default="auto")
    tmax = _resolve(args, plan_kv, "tmax", default="100000,500000,1000000")
    algos = _resolve(args, plan_kv, "algos", default="opoa,opla")
    try:
        plan = ExperimentPlan(
            graphs=list(graphs),
            cost=_resolve(args, plan_kv, "cost", default="uniform"),
            budgets=None if str(budgets).strip() == "auto" else _number_list(str(budgets)),
            t_max=[int(t) for t in _number_list(str(tmax))],
            repetitions=int(_resolve(args, plan_kv, "reps", default=30)),
            algorithms=tuple(a.strip() for a in str(algos).split(",") if a.strip()),
            base_seed=int(_resolve(args, plan_kv, "seed", default=0)),
            mutation=_resolve(args, plan_kv, "mutation", default="plus"),
            jobs=int(_resolve(args, plan_kv, "jobs", default=default_jobs())),
        )
    except (ContractError, ValueError) as e:
        raise UsageError(str(e)) from None
    fmt = _resolve(args, plan_kv, "format", default="text")
    if fmt not in ("csv", "text", "markdown"):
        raise UsageError(f"unknown format {fmt!r}")

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table = run_experiment(plan)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    text = emit_table(table, fmt)
    out = _resolve(args, plan_kv, "out")
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    dump = _resolve(args, plan_kv, "dump")
    if dump:
        with open(dump, "w", encoding="utf-8", newline="") as fh:
            fh.write(dump_runs(table.runs))
    return EXIT_OK


def _single_graph(args):
    if not args.graph or len(args.graph) != 1:
        raise UsageError("exactly one --graph is required")
    return read_graph(args.graph[0])


def cmd_oracle(args) -> int:
    g = _single_graph(args)
    inst = build_instance(g.data, args.cost or "uniform", args.seed or 0)
    budgets = _number_list(args.budgets)
    try:
        res = brute_force(inst, budgets)
    except ContractError as e:
        raise UsageError(str(e)) from None
    print("B,opt,witness")
    for b in budgets:
        f, sol = res.per_budget_opt[b]
        print(f"{b},{f:g},{' '.join(map(str, sol.indices()))}")
    return EXIT_OK


def cmd_check(args) -> int:
    g = _single_graph(args)
    obj = CoverageObjective(g.data)
    if args.sample is not None:
        k = args.sample
        if not 1 <= k <= min(PROPERTY_MAX_N, obj.n):
            raise UsageError(f"--sample must be in 1..{min(PROPERTY_MAX_N, obj.n)}")
        rng = RandomSource(args.seed or 0)
        elems = np.sort(rng.generator.choice(obj.n, size=k, replace=False))
        obj = RestrictedObjective(obj, elems.tolist())
        print(f"ground set restricted to nodes {elems.tolist()}")
    elif obj.n > PROPERTY_MAX_N:
        raise UsageError(f"graph has n={obj.n} > {PROPERTY_MAX_N}; pass --sample K")
    rep = check_submodular_properties(obj)
    for name in ("monotone", "lattice", "diminishing_returns", "gain_sum_bound", "lemma_delta"):
        print(f"{name}: {getattr(rep, name)} violations in {rep.checked[name]} checks")
    if obj.n <= RATIO_MAX_N:
        ratio = submodularity_ratio(obj)
        print(f"submodularity_ratio: {ratio.alpha_f} (witness {ratio.witness}, {ratio.pairs_checked} pairs)")
    return EXIT_BREACH if rep.total_violations else EXIT_OK


def cmd_counterexample(args) -> int:
    kc = KnapsackCounterexample(args.n, args.L)
    inst = kc.instance()
    t_epoch, t_max = theorem3_parameters(kc.n, kc.budget, per_budget=True)
    lam = t_max // kc.budget
    hits_archive = hits_lambda = 0
    for r in range(args.runs):
        seed = args.seed + r
        a = run_one_plus_one_archive(inst, ArchiveConfig(t_max, mutation=args.mutation, seed=seed))
        b = run_one_plus_lambda(inst, OnePlusLambdaConfig(lam, mutation=args.mutation, seed=seed))
        if a.evaluations_used > t_max or b.evaluations_used != lam * kc.budget:
            raise InvariantBreach("evaluation budget exceeded")
        hits_archive += a.final_f == kc.L
        hits_lambda += b.final_f == kc.L
    print(f"n={kc.n} L={kc.L:g} B={kc.budget} t_epoch={t_epoch} t_max={t_max} lambda={lam}")
    print(f"opoa optimal: {hits_archive}/{args.runs}")
    print(f"opla optimal: {hits_lambda}/{args.runs}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "oracle": cmd_oracle, "check": cmd_check,
            "counterexample": cmd_counterexample}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"submod-ea: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphParseError, OSError) as e:
        print(f"submod-ea: input error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (InvariantBreach, AssertionError) as e:
        print(f"submod-ea: internal invariant breach: {e}", file=sys.stderr)
        return EXIT_BREACH
    except ConfigurationError as e:
        print(f"submod-ea: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
