import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import balanced_graphs, semibipartite_graphs
from ctap.errors import DegenerateKernel, NotHermitian, PartyPlacement, PartyUnsupported
from ctap.generators import path, random_bipartite, square_grid, subdivided_tree
from ctap.graph import adjacency, build_graph, delete_vertex, is_connected
from ctap.viability import (
    SUPPORT_TOL,
    Attachment,
    check_viability,
    det_is_nonzero,
    det_without,
    extend_dangling,
    graph_kernel,
    has_matching_without,
    nullity,
    randomize_weights,
    reduce_dangling,
    zero_eigenvector,
)


def test_lambda_kernel():
    z = graph_kernel(path(3))
    assert np.allclose(z, [1 / np.sqrt(2), -1 / np.sqrt(2), 0])
    assert z[2] == 0


def test_complex_lambda_kernel():
    g = build_graph(2, 1, [(0, 2, 1.0), (1, 2, 1j)], parties=(0, 1))
    z = graph_kernel(g)
    # A z = 0 needs z0 + (-i) z1 = 0 on the V2 row
    assert abs(z[0] - 1j * z[1]) < 1e-12
    assert z[0].imag == 0 and z[0].real > 0


def test_path5_kernel_alternates():
    z = graph_kernel(path(5))
    assert np.allclose(z[:3], np.array([1, -1, 1]) / np.sqrt(3))
    assert np.all(z[3:] == 0)


def test_nullity_and_errors():
    assert nullity(np.zeros((3, 3))) == 3
    assert nullity(np.eye(2)) == 0
    with pytest.raises(NotHermitian):
        nullity(np.array([[0, 1], [0, 0]]))
    with pytest.raises(DegenerateKernel) as info:
        zero_eigenvector(np.zeros((2, 2)))
    assert info.value.dim == 2


def test_nullity_tolerance_is_relative():
    A = 1e6 * adjacency(path(5))
    assert nullity(A) == 1
    A[0, 0] = 1e-4  # below 1e-9 * ||A||
    assert nullity((A + A.T) / 2) == 1


def test_lambda_report():
    r = check_viability(path(3))
    assert r.viable and r.zero_space_dim == 1 and r.zero_support_ok
    assert [c.det_value for c in r.per_party] == [-1, -1]
    kv = r.as_kv()
    assert "viable=true" in kv and "party.0.det=-1" in kv


def test_report_on_failures():
    g = build_graph(3, 1, [(0, 3), (1, 3), (2, 3)], parties=(0, 1))
    r = check_viability(g)
    assert not r.viable and not r.balanced
    assert not has_matching_without(g, 0)
    assert "unbalanced" in has_matching_without(g, 0).reason
    assert det_without(g, 0) == 0


def test_party_must_be_v1():
    with pytest.raises(PartyPlacement):
        det_without(path(3), 2)


def test_matching_pairs_reported_in_graph_ids():
    g = square_grid(3)
    m = has_matching_without(g, g.parties[0])
    assert m.exists and len(m.pairs) == g.n2
    assert all(u < g.n1 <= v and g.weight(u, v) != 0 for u, v in m.pairs)


def test_structural_zero_is_exact():
    # V1 vertices 1, 2 share their only neighbour, so G - 0 has no matching
    g = build_graph(3, 2, [(0, 3), (0, 4), (1, 3), (2, 3)], parties=(0,))
    assert det_without(g, 0) == 0 and not det_is_nonzero(g, 0)


def test_randomize_weights_deterministic_and_in_range():
    g = square_grid(5)
    h1, h2 = randomize_weights(g, 4), randomize_weights(g, 4)
    assert h1 == h2 and h1 != randomize_weights(g, 5)
    w = np.array([e[2] for e in h1.edges])
    assert np.all((w.real > 0) & (w.real <= 2)) and np.all(w.imag == 0)


@given(balanced_graphs())
def test_det_identity(g):
    # |det A_{G-p}| = |det B~|^2 with B~ the V1-p x V2 block
    B = adjacency(g)[:g.n1, g.n1:]
    for p in range(g.n1):
        Bt = np.delete(B, p, axis=0)
        expected = abs(np.linalg.det(Bt)) ** 2 if Bt.size else 1.0
        assert abs(abs(det_without(g, p)) - expected) <= 1e-9 * max(1.0, expected)


@given(balanced_graphs())
def test_kernel_confined_to_v1(g):
    A = adjacency(g)
    assume(nullity(A) == 1)
    z = graph_kernel(g)
    assert np.all(z[g.n1:] == 0)
    assert np.linalg.norm(A @ z) < 1e-8


@given(balanced_graphs(), st.integers(0, 10_000))
def test_determinant_condition_iff_kernel_support(g, seed):
    h = randomize_weights(g, seed)
    A = adjacency(h)
    for p in range(h.n1):
        lhs = det_is_nonzero(h, p)
        rhs = nullity(A) == 1 and abs(graph_kernel(h)[p]) > SUPPORT_TOL
        assert lhs == rhs


# -- dangling pairs ------------------------------------------------------------

def test_reduce_dangling_keeps_parties():
    g = subdivided_tree(2, 2)
    g = g.with_parties((g.parties[0], g.parties[-1]))
    reduced, log = reduce_dangling(g)
    # each inner leaf goes together with its subdivision vertex; a 9-vertex path remains
    assert reduced.n == 9 and log == [(4, 10), (5, 11)]
    assert len(reduced.parties) == 2
    assert is_connected(reduced)
    for v, u in log:
        assert v not in g.parties and u not in g.parties


def test_extend_then_reduce_is_identity():
    g = path(3)
    h = extend_dangling(g, Attachment(u_part=2, edges=((1, 0.7),), v_weight=1.3), new_party=True)
    assert (h.n1, h.n2) == (3, 2)
    assert h.parties == (0, 1, 2)
    assert nullity(adjacency(h)) == 1
    sub, _ = delete_vertex(h, 2)
    assert det_is_nonzero(h, 2) == (nullity(adjacency(sub)) == 0)


def test_new_party_amplitude_formula():
    g = path(3)
    att = Attachment(u_part=2, edges=((0, 0.5), (1, 2.0)), v_weight=0.8)
    h = extend_dangling(g, att, new_party=True)
    z_old = graph_kernel(g)
    z_new = graph_kernel(h)
    predicted = -(0.5 * z_old[0] + 2.0 * z_old[1]) / 0.8
    # the new kernel restricted to the old V1 is proportional to z_old
    scale = z_new[0] / z_old[0]
    assert abs(z_new[2] - scale * predicted) < 1e-10


def test_new_party_without_support():
    g = path(3)
    with pytest.raises(PartyUnsupported):
        extend_dangling(g, Attachment(u_part=2, edges=((0, 1.0), (1, 1.0))), new_party=True)


@st.composite
def attachments(draw, g):
    part = draw(st.sampled_from([1, 2]))
    targets = range(g.n1, g.n) if part == 1 else range(g.n)
    chosen = draw(st.lists(st.sampled_from(list(targets)), unique=True, max_size=3)) if targets else []
    w = st.floats(0.2, 2.0)
    loop = draw(w) if part == 2 and draw(st.booleans()) else 0.0
    return Attachment(part, tuple((x, draw(w)) for x in chosen), loop, draw(w))


@given(semibipartite_graphs(complex_weights=True), st.data())
def test_dangling_pair_preserves_nullity(g, data):
    att = data.draw(attachments(g))
    h = extend_dangling(g, att)
    assert nullity(adjacency(h)) == nullity(adjacency(g))



def test_randomized_square_grid_has_simple_kernel():
    g = square_grid(3)
    ones = sum(nullity(adjacency(randomize_weights(g, s))) == 1 for s in range(1000))
    assert ones >= 990
