"""Shared simulation for the archive pruning equivalence checks."""
import numpy as np

from submod_ea.algorithms import Archive
from submod_ea.core import RandomSource, Solution, evaluate_cached
from submod_ea.problems import coverage_instance, make_random_costs, random_graph


def archive_sequence(inst, rng, epochs, steps):
    """Feed one stream of random offspring to a pruned and an unpruned
    archive, each driving its own incumbent by the epoch rules.  Returns the
    incumbent f after every promotion step for both."""
    n = inst.n
    B = inst.budget
    arcs = {True: Archive(prune=True), False: Archive(prune=False)}
    inc_f = {True: 0.0, False: 0.0}
    trace = {True: [], False: []}
    b_hat = 0
    for _ in range(epochs):
        for _ in range(steps):
            y = Solution(rng.random(n) < rng.random())
            fy, cy = evaluate_cached(inst, y)
            for key in (True, False):
                if b_hat < cy <= B:
                    arcs[key].insert(y)
                if cy <= b_hat and fy >= inc_f[key]:
                    inc_f[key] = fy
        for key in (True, False):
            arcs[key].purge(b_hat)
        b_hat = min(b_hat + 1, B)
        for key in (True, False):
            cand = arcs[key].best_within(b_hat)
            if cand is not None and cand.cached_f >= inc_f[key]:
                inc_f[key] = cand.cached_f
            trace[key].append(inc_f[key])
    return trace[True], trace[False], arcs


def run_equivalence(sequences, seed):
    """Return (mismatching sequences, max pruned size, max unpruned size)."""
    rng = RandomSource(seed)
    mismatches = 0
    peak = {True: 0, False: 0}
    inst = None
    for s in range(sequences):
        if s % 100 == 0:
            n = int(4 + rng.integers(7))
            g = random_graph(n, 0.3, rng)
            cost = make_random_costs(n, rng) if s % 200 else None
            B = float(1 + rng.integers(n))
            inst = coverage_instance(g, B, cost)
        epochs = int(1 + rng.integers(int(np.ceil(inst.budget)) + 1))
        steps = int(1 + rng.integers(12))
        a, b, arcs = archive_sequence(inst, rng, epochs, steps)
        if a != b:
            mismatches += 1
        for key in (True, False):
            peak[key] = max(peak[key], arcs[key].peak_size)
    return mismatches, peak[True], peak[False]
