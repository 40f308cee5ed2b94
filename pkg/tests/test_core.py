import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from submod_ea.core import (
    ContractError,
    EvaluationCounter,
    Instance,
    RandomSource,
    Solution,
    evaluate_cached,
    marginal_gain,
)
from submod_ea.problems import LinearCost, coverage_instance, random_graph, uniform_cost

from conftest import SetFunction


@pytest.fixture
def two_sets():
    # A1 = {1, 2}, A2 = {2, 3}
    sets = [{1, 2}, {2, 3}]
    return SetFunction(2, lambda S: len(set().union(*(sets[i] for i in S))))


def test_marginal_gain_newly_covered(two_sets):
    x = Solution.from_indices(2, [0])
    assert marginal_gain(two_sets, x, 1) == 1


def test_marginal_gain_from_empty(two_sets):
    assert marginal_gain(two_sets, Solution.empty(2), 1) == 2


def test_marginal_gain_bit_already_set(two_sets):
    assert marginal_gain(two_sets, Solution.from_indices(2, [1]), 1) == 0


@pytest.mark.parametrize("i", [-1, 2, 10])
def test_marginal_gain_index_out_of_range(two_sets, i):
    with pytest.raises(ContractError):
        marginal_gain(two_sets, Solution.empty(2), i)


def test_evaluate_cached_examples(two_sets):
    inst = Instance(two_sets, uniform_cost(2), 1)
    assert evaluate_cached(inst, Solution.empty(2)) == (0.0, 0.0)
    assert evaluate_cached(inst, Solution.from_indices(2, [0])) == (2.0, 1.0)
    assert evaluate_cached(inst, Solution(np.ones(2, bool)))[1] == 2


def test_evaluate_cached_length_mismatch(two_sets):
    inst = Instance(two_sets, uniform_cost(2), 1)
    with pytest.raises(ContractError):
        evaluate_cached(inst, Solution.empty(3))


def test_repeated_calls_do_not_reevaluate(two_sets):
    calls = []

    class Counting(type(two_sets)):
        def evaluate(self, bits):
            calls.append(1)
            return super().evaluate(bits)

    obj = Counting(two_sets.n, two_sets.fn)
    inst = Instance(obj, uniform_cost(2), 1)
    x = Solution.from_indices(2, [1])
    counter = EvaluationCounter(inst)
    for _ in range(5):
        assert counter(x) == (2.0, 1.0)
    assert len(calls) == 1
    assert counter.count == 1


def test_cached_matches_fresh_on_random_solutions():
    rng = RandomSource(7)
    g = random_graph(40, 0.1, rng)
    cost = LinearCost(rng.uniform(0.5, 1.5, size=40))
    inst = coverage_instance(g, 10, cost)
    for _ in range(1000):
        x = Solution(rng.random(40) < rng.random())
        f, c = evaluate_cached(inst, x)
        assert f == inst.objective.evaluate(x.bits)
        assert c == inst.cost.evaluate(x.bits)
        assert (x.cached_f, x.cached_c) == (f, c)


def test_instance_invariants(two_sets):
    with pytest.raises(ContractError):
        Instance(two_sets, uniform_cost(3), 1)
    with pytest.raises(ContractError):
        Instance(two_sets, uniform_cost(2), 0)


def test_solution_is_read_only():
    x = Solution.from_indices(4, [1])
    with pytest.raises(ValueError):
        x.bits[0] = True
    y = x.with_bit(2)
    assert x.indices() == [1] and y.indices() == [1, 2]
    assert len(y) == 4


@settings(max_examples=30)
@given(st.integers(0, 2**64 - 1), st.integers(0, 3))
def test_random_source_reproducible(seed, stream):
    a, b = RandomSource(seed, stream), RandomSource(seed, stream)
    assert np.array_equal(a.random(5), b.random(5))
    assert a.binomial(100, 0.01) == b.binomial(100, 0.01)
    assert np.array_equal(a.integers(1000, size=7), b.integers(1000, size=7))


def test_random_source_streams_differ():
    assert not np.array_equal(RandomSource(1, 0).random(4), RandomSource(1, 1).random(4))


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_random_source_rejects_bad_seed(seed):
    with pytest.raises(ContractError):
        RandomSource(seed)
