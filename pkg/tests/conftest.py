import os
import sys

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from ctap.graph import WeightedGraph  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def semibipartite_graphs(draw, max_n1=4, max_n2=4, complex_weights=True, min_n1=1):
    """Random semi-bipartite graphs (not necessarily connected or balanced)."""
    n1 = draw(st.integers(min_n1, max_n1))
    n2 = draw(st.integers(0, max_n2))
    n = n1 + n2
    slots = [(u, v) for u in range(n1) for v in range(n1, n)]
    slots += [(u, v) for u in range(n1, n) for v in range(u, n)]
    present = draw(st.lists(st.booleans(), min_size=len(slots), max_size=len(slots)))
    mag = st.floats(0.1, 2.0, allow_nan=False)
    edges = []
    for (u, v), keep in zip(slots, present):
        if not keep:
            continue
        w = draw(mag)
        if complex_weights and u != v:
            w = w * np.exp(1j * draw(st.floats(-np.pi, np.pi)))
        edges.append((u, v, complex(w)))
    k = draw(st.integers(0, n1))
    return WeightedGraph(n1, n2, tuple(edges), tuple(range(k)))


@st.composite
def balanced_graphs(draw, max_n2=4, complex_weights=True):
    n2 = draw(st.integers(0, max_n2))
    g = draw(semibipartite_graphs(max_n1=n2 + 1, max_n2=n2, complex_weights=complex_weights,
                                  min_n1=n2 + 1))
    if g.n2 != n2:
        g = WeightedGraph(g.n1, n2, tuple(e for e in g.edges if e[1] < g.n1 + n2), g.parties)
    return g


@pytest.fixture
def lambda_graph():
    from ctap.generators import path
    return path(3)


# -- acceptance reporting --------------------------------------------------------

def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def criterion(request):
    """``criterion(n, ok, detail)`` records one PASS/FAIL line and returns ``ok``."""
    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        print(line)
        request.config._acceptance_lines.append((number, line))
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines, key=lambda x: x[0]):
            terminalreporter.write_line(line)
