"""Budget-incrementing evolutionary algorithms for monotone submodular
maximization under cardinality and general cost constraints."""

from .algorithms import (
    Archive,
    ArchiveConfig,
    OnePlusLambdaConfig,
    RunRecord,
    archive_insert,
    run_one_plus_lambda,
    run_one_plus_one_archive,
    theorem2_parameters,
    theorem3_parameters,
)
from .analysis import (
    ComparisonRow,
    SubmodularityReport,
    check_lemma_delta,
    check_submodular_properties,
    rank_sum_test,
    submodularity_ratio,
    summarize,
)
from .baselines import OracleResult, brute_force, greedy, run_gsemo
from .core import (
    ConfigurationError,
    ContractError,
    CostFunction,
    Instance,
    ObjectiveFunction,
    RandomSource,
    Solution,
    evaluate_cached,
    marginal_gain,
)
from .ingest import load_graph, read_graph
from .mutation import MutationOperator, mutate, single_bit_flip_probability
from .problems import (
    CoverageInstanceData,
    CoverageObjective,
    KnapsackCounterexample,
    LinearCost,
    LinearObjective,
    budget_grid,
    coverage_instance,
    knapsack_objective,
    make_random_costs,
    uniform_cost,
)

__version__ = "0.1.0"
