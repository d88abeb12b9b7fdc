import random

from hypothesis import given
from hypothesis import strategies as st

from ctap.matching import hopcroft_karp
from oracles import brute_force_perfect_matching


@st.composite
def bipartite(draw):
    nl = draw(st.integers(0, 6))
    nr = draw(st.integers(0, 6))
    adj = [sorted(set(draw(st.lists(st.integers(0, nr - 1), max_size=nr)))) if nr else []
           for _ in range(nl)]
    return nl, nr, adj


def _valid(match, adj, nr):
    used = [m for m in match if m >= 0]
    return len(used) == len(set(used)) and all(m in adj[u] for u, m in enumerate(match) if m >= 0)


@given(bipartite())
def test_agrees_with_brute_force(case):
    nl, nr, adj = case
    match = hopcroft_karp(nl, nr, adj)
    assert _valid(match, adj, nr)
    assert all(m >= 0 for m in match) == brute_force_perfect_matching(nl, nr, adj)


def test_maximum_size_on_random_graphs():
    rng = random.Random(7)
    for _ in range(200):
        nl, nr = rng.randint(1, 7), rng.randint(1, 7)
        adj = [[j for j in range(nr) if rng.random() < 0.35] for _ in range(nl)]
        match = hopcroft_karp(nl, nr, adj)
        size = sum(m >= 0 for m in match)
        # max matching size via brute force over left subsets
        best = max(k for k in range(min(nl, nr) + 1)
                   if any(brute_force_perfect_matching(k, nr, [adj[i] for i in sub])
                          for sub in _subsets(nl, k)))
        assert size == best


def _subsets(n, k):
    from itertools import combinations
    return combinations(range(n), k)


def test_large_chain():
    n = 3000
    adj = [[i, i + 1] if i + 1 < n else [i] for i in range(n)]
    assert all(m >= 0 for m in hopcroft_karp(n, n, adj))
