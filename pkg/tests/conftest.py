import itertools

import numpy as np
import pytest

from gehm.graph import WeightedGraph


def complete_graph(n, weight=1.0):
    pairs = list(itertools.combinations(range(n), 2))
    return WeightedGraph.from_edges(n, pairs, [weight] * len(pairs))


def cycle_graph(n):
    return WeightedGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves):
    return WeightedGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def edge_graph():
    return WeightedGraph.from_edges(2, [(0, 1)])


def random_connected_graph(rng, n, extra_prob=0.3, weighted=True):
    """Random spanning tree plus extra edges; symmetric weights in [0.1, 2)."""
    pairs = set()
    order = rng.permutation(n)
    for k in range(1, n):
        pairs.add(tuple(sorted((int(order[k]), int(order[rng.integers(k)])))))
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < extra_prob:
            pairs.add((i, j))
    pairs = sorted(pairs)
    w = rng.uniform(0.1, 2.0, len(pairs)) if weighted else None
    return WeightedGraph.from_edges(n, pairs, w)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance bookkeeping: criterion number -> list of (part, passed, detail)
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[num]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{p[0]}{': ' if p[0] else ''}{'ok' if p[1] else 'FAILED'} ({p[2]})" for p in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")
