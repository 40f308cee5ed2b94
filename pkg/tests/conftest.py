import itertools

import numpy as np
import pytest

from submod_ea.core import ObjectiveFunction, RandomSource
from submod_ea.problems import CoverageInstanceData, random_graph

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(ac_id: str, ok: bool, detail: str):
    _ACCEPTANCE_LINES.append(f"{ac_id}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def star_graph(leaves=4):
    return CoverageInstanceData.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)], "star")


def path_graph(n=4):
    return CoverageInstanceData.from_edges(n, [(i, i + 1) for i in range(n - 1)], "path")


def random_instances(count, n_range, seed, p=0.25):
    rng = RandomSource(seed)
    out = []
    for i in range(count):
        n = int(n_range[0] + rng.integers(n_range[1] - n_range[0] + 1))
        out.append(random_graph(n, p, rng, name=f"gnp{i}"))
    return out


class SetFunction(ObjectiveFunction):
    """Objective defined by a Python callable on frozensets of indices."""

    def __init__(self, n, fn):
        self.n = n
        self.fn = fn

    def evaluate(self, bits):
        return float(self.fn(frozenset(np.flatnonzero(bits).tolist())))


def subsets(n):
    for k in range(n + 1):
        yield from itertools.combinations(range(n), k)


@pytest.fixture
def star():
    return star_graph()
