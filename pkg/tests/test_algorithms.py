import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from submod_ea.algorithms import (
    Archive,
    ArchiveConfig,
    OnePlusLambdaConfig,
    archive_insert,
    run_one_plus_lambda,
    run_one_plus_one_archive,
    theorem2_parameters,
    theorem3_parameters,
)
from submod_ea.core import ConfigurationError, Instance, RandomSource, Solution
from submod_ea.mutation import MutationOperator
from submod_ea.problems import (
    KnapsackCounterexample,
    LinearObjective,
    coverage_instance,
    make_random_costs,
    random_graph,
    uniform_cost,
)

from conftest import star_graph
from helpers import run_equivalence

PLUS = MutationOperator.PLUS


def entry(c, f, n=4):
    s = Solution.empty(n)
    s.cached_c, s.cached_f = float(c), float(f)
    return s


@pytest.mark.parametrize("n, r, lam, t_max", [(100, 10, 2504, 25040), (2, 1, 8, 8)])
def test_theorem2_parameters(n, r, lam, t_max):
    assert theorem2_parameters(n, r) == (lam, t_max)


def test_theorem2_full_budget():
    lam, t_max = theorem2_parameters(30, 30)
    assert t_max == 30 * lam


def test_theorem3_parameters():
    assert theorem3_parameters(100, 10, per_budget=True) == (2504, 25040)
    assert theorem3_parameters(100, 1, True)[0] == theorem3_parameters(100, 1, False)[0] == 1252
    assert theorem3_parameters(2, 2, per_budget=False) == (8, 16)


def test_parameter_preconditions():
    with pytest.raises(ConfigurationError):
        theorem2_parameters(1, 1)
    with pytest.raises(ConfigurationError):
        theorem2_parameters(5, 6)
    with pytest.raises(ConfigurationError):
        theorem3_parameters(5, 0)


def test_archive_insert_into_empty():
    a = Archive()
    assert archive_insert(a, entry(2, 1))
    assert len(a) == 1


def test_archive_rejects_dominated():
    a = Archive()
    a.insert(entry(3, 10))
    assert not a.insert(entry(4, 8))
    assert len(a) == 1


def test_archive_prunes_weakly_dominated():
    a = Archive()
    z = entry(4, 8)
    a.insert(z)
    assert a.insert(entry(3, 10))
    assert len(a) == 1 and all(e is not z for e in a)


def test_archive_without_pruning_keeps_everything_admitted():
    a = Archive(prune=False)
    a.insert(entry(4, 8))
    a.insert(entry(3, 10))
    assert len(a) == 2


def test_archive_equal_points_replace():
    a = Archive()
    a.insert(entry(2, 5))
    assert a.insert(entry(2, 5))
    assert len(a) == 1


def test_archive_purge_and_best_within():
    a = Archive(prune=False)
    first, second = entry(2, 7), entry(2, 7)
    for e in (entry(1, 3), first, second, entry(3, 9)):
        a.insert(e)
    assert a.best_within(2) is first
    assert a.best_within(0.5) is None
    a.purge(2)
    assert [e.cached_c for e in a] == [3]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 6), st.integers(0, 6)), min_size=1, max_size=40))
def test_pruned_archive_holds_no_beaten_entry(points):
    a = Archive()
    for c, f in points:
        a.insert(entry(c, f))
    es = list(a)
    for y in es:
        for z in es:
            if y is not z:
                assert not (z.cached_c <= y.cached_c and z.cached_f > y.cached_f)
    by_cost = sorted(es, key=lambda e: (e.cached_c, e.cached_f))
    fs = [e.cached_f for e in by_cost]
    assert fs == sorted(fs)


def test_pruning_preserves_promotions_small():
    mismatches, pruned_peak, plain_peak = run_equivalence(500, seed=3)
    assert mismatches == 0
    assert pruned_peak <= plain_peak


# -- (1+lambda)-EA -----------------------------------------------------------

def test_opla_star_finds_center_with_plus():
    inst = coverage_instance(star_graph(), 1)
    hits = sum(
        run_one_plus_lambda(inst, OnePlusLambdaConfig(50, mutation=PLUS, seed=s)).final_f == 5
        for s in range(100)
    )
    # exact per-run success probability is 0.99849
    assert hits >= 99


def test_opla_star_finds_center_with_standard_bit():
    inst = coverage_instance(star_graph(), 1)
    hits = sum(
        run_one_plus_lambda(inst, OnePlusLambdaConfig(50, seed=s)).final_f == 5 for s in range(100)
    )
    # exact per-run success probability is 1 - (1 - 0.08192)^50 = 0.98607
    assert hits >= 95


def test_opla_zero_objective():
    inst = Instance(LinearObjective(np.zeros(6)), uniform_cost(6), 3)
    rec = run_one_plus_lambda(inst, OnePlusLambdaConfig(20, seed=1))
    assert rec.final_f == 0
    assert rec.final_c <= 3


def test_opla_knapsack_stays_stuck():
    kc = KnapsackCounterexample(12, 4096)
    lam = math.ceil(2 * math.e * 12 * math.log(12))
    stuck = sum(
        run_one_plus_lambda(kc.instance(), OnePlusLambdaConfig(lam, seed=s)).final_f <= 11
        for s in range(100)
    )
    assert stuck >= 95


def test_opla_evaluation_count_and_trace():
    g = random_graph(12, 0.3, RandomSource(3))
    inst = coverage_instance(g, 4)
    rec = run_one_plus_lambda(inst, OnePlusLambdaConfig(17, seed=5))
    assert rec.evaluations_used == 4 * 17
    fs = [f for _, f, _ in rec.per_epoch_best]
    assert fs == sorted(fs)
    assert all(c <= b for b, _, c in rec.per_epoch_best)
    assert [b for b, _, _ in rec.per_epoch_best] == [1, 2, 3, 4]
    assert rec.final_c <= 4


def test_opla_rejects_budget_above_n():
    inst = coverage_instance(star_graph(), 5)
    with pytest.raises(ConfigurationError):
        run_one_plus_lambda(inst, OnePlusLambdaConfig(3, budget_B=6))
    with pytest.raises(ConfigurationError):
        OnePlusLambdaConfig(0)


def test_opla_deterministic_under_seed():
    g = random_graph(20, 0.2, RandomSource(8))
    inst = coverage_instance(g, 5)
    a = run_one_plus_lambda(inst, OnePlusLambdaConfig(30, mutation=PLUS, seed=9))
    b = run_one_plus_lambda(inst, OnePlusLambdaConfig(30, mutation=PLUS, seed=9))
    assert a.final_solution == b.final_solution
    assert a.per_epoch_best == b.per_epoch_best


# -- (1+1)-EA with archive ---------------------------------------------------

def test_opoa_knapsack_reaches_optimum():
    kc = KnapsackCounterexample(12, 4096)
    _, t_max = theorem3_parameters(12, 11, per_budget=True)
    wins = sum(
        run_one_plus_one_archive(kc.instance(), ArchiveConfig(t_max, seed=s)).final_f == 4096
        for s in range(100)
    )
    assert wins >= 95


def test_opoa_zero_objective_single_epoch():
    inst = Instance(LinearObjective(np.zeros(5)), uniform_cost(5), 1)
    rec = run_one_plus_one_archive(inst, ArchiveConfig(t_max=40, seed=2))
    assert rec.config["t_epoch"] == 40
    assert rec.evaluations_used == 40
    assert set(rec.per_budget_best) == {0, 1}
    assert rec.per_budget_best[0] == Solution.empty(5)
    assert rec.per_budget_best[1].cached_f == 0
    assert rec.final_f == 0 and rec.final_c <= 1


def test_opoa_star_per_budget():
    inst = coverage_instance(star_graph(), 2)
    hits = sum(
        run_one_plus_one_archive(inst, ArchiveConfig(400, seed=s)).per_budget_best[1].cached_f == 5
        for s in range(100)
    )
    assert hits >= 99


def test_opoa_rejects_empty_epochs():
    inst = coverage_instance(star_graph(), 3)
    with pytest.raises(ConfigurationError):
        run_one_plus_one_archive(inst, ArchiveConfig(t_max=2))


@pytest.mark.parametrize("budget", [3, 2.5])
def test_opoa_invariants_on_random_costs(budget):
    rng = RandomSource(21)
    g = random_graph(14, 0.25, rng)
    inst = coverage_instance(g, budget, make_random_costs(14, rng))
    t_max = 301
    rec = run_one_plus_one_archive(inst, ArchiveConfig(t_max, mutation=PLUS, seed=4))
    assert rec.evaluations_used <= t_max
    fs = [f for _, f, _ in rec.per_epoch_best]
    assert fs == sorted(fs)
    for b, x in rec.per_budget_best.items():
        assert x.cached_c <= b
    assert rec.final_c <= budget
    assert max(rec.per_budget_best) == budget
    # ceil(B) epochs of t_epoch steps, then the remainder runs at the final bound
    assert rec.config["t_epoch"] == t_max // math.ceil(budget)


def test_opoa_monotone_incumbent_stepwise():
    g = random_graph(10, 0.3, RandomSource(30))
    inst = coverage_instance(g, 4)
    prev = -1.0
    for b in sorted(run_one_plus_one_archive(inst, ArchiveConfig(200, seed=1)).per_budget_best.items()):
        assert b[1].cached_f >= prev
        prev = b[1].cached_f
