"""Checks for the transfer hypotheses on a graph with a party set.

A graph is *viable* when it is connected, ``|V1| = |V2| + 1``, and for every
party ``p`` the matrix ``A_{G-p}`` is nonsingular.  Under the balance condition
that determinant condition is equivalent to ``A_G`` having a one-dimensional
kernel whose vector is nonzero on every party; both sides are computed here
so they can be cross-checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateKernel,
    NotHermitian,
    PartyPlacement,
    PartyUnsupported,
    SemiBipartiteViolation,
)
from .graph import WeightedGraph, adjacency, delete_vertex, delete_vertices, is_connected
from .matching import hopcroft_karp
from .rng import uniforms

ZERO_TOL = 1e-9      # |lambda| < ZERO_TOL * max(1, ||A||_2) counts as zero
SNAP_TOL = 1e-8      # V2 kernel amplitudes below this are set to exactly 0
SUPPORT_TOL = 1e-7   # kernel amplitude on a party must exceed this


def check_hermitian(A: np.ndarray, rtol: float = 1e-12) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {A.shape}")
    if A.size and np.max(np.abs(A - A.conj().T)) > rtol * max(1.0, np.max(np.abs(A))):
        raise NotHermitian("matrix is not hermitian")


def zero_threshold(eigenvalues: np.ndarray, tolerance: float = ZERO_TOL) -> float:
    scale = np.max(np.abs(eigenvalues)) if len(eigenvalues) else 0.0
    return tolerance * max(1.0, scale)


def nullity(matrix: np.ndarray, tolerance: float = ZERO_TOL) -> int:
    """Number of eigenvalues with ``|lambda| < tolerance * max(1, ||A||_2)``."""
    A = np.asarray(matrix)
    check_hermitian(A)
    if A.shape[0] == 0:
        return 0
    lam = np.linalg.eigvalsh(A)
    return int(np.sum(np.abs(lam) < zero_threshold(lam, tolerance)))


def zero_eigenvector(matrix: np.ndarray, tolerance: float = ZERO_TOL,
                     n1: int | None = None) -> np.ndarray:
    """Unit kernel vector of a hermitian matrix with one-dimensional kernel.

    The phase is fixed so the first nonzero entry is real and positive.  When
    ``n1`` is given and the matrix is the adjacency of a balanced
    semi-bipartite graph, the V2 entries (index >= n1) are snapped to zero.
    """
    A = np.asarray(matrix)
    check_hermitian(A)
    lam, vecs = np.linalg.eigh(A)
    small = np.abs(lam) < zero_threshold(lam, tolerance)
    if small.sum() != 1:
        raise DegenerateKernel(int(small.sum()))
    z = vecs[:, int(np.argmax(small))].astype(complex)
    n = A.shape[0]
    if n1 is not None and n == 2 * n1 - 1 and np.all(np.abs(z[n1:]) < SNAP_TOL):
        z[n1:] = 0
        z /= np.linalg.norm(z)
    first = np.flatnonzero(np.abs(z) > SNAP_TOL)[0]
    z *= np.exp(-1j * np.angle(z[first]))
    z[first] = abs(z[first])
    return z


def graph_kernel(graph: WeightedGraph, tolerance: float = ZERO_TOL) -> np.ndarray:
    return zero_eigenvector(adjacency(graph), tolerance, n1=graph.n1)


# -- per-party determinant condition -----------------------------------------

@dataclass(frozen=True)
class MatchingResult:
    exists: bool
    pairs: tuple[tuple[int, int], ...] = ()
    reason: str = ""

    def __bool__(self):
        return self.exists


def _require_v1(graph: WeightedGraph, p: int) -> None:
    if not graph.in_v1(p):
        raise PartyPlacement(f"vertex {p} is not in V1")


def has_matching_without(graph: WeightedGraph, p: int) -> MatchingResult:
    """Does ``G - p`` have a perfect matching?  Searches V1-V2 edges only.

    Only defined for balanced graphs, where ``|V1 - p| = |V2|`` forces every
    perfect matching onto cross edges.  Pairs are reported in ``G``'s ids.
    """
    _require_v1(graph, p)
    if not graph.balanced:
        return MatchingResult(False, reason=f"unbalanced parts: |V1|={graph.n1}, |V2|={graph.n2}")
    left = [u for u in range(graph.n1) if u != p]
    adj = [[v - graph.n1 for v in graph.neighbors[u] if v >= graph.n1] for u in left]
    match = hopcroft_karp(len(left), graph.n2, adj)
    if any(m < 0 for m in match):
        unmatched = [left[i] for i, m in enumerate(match) if m < 0]
        return MatchingResult(False, reason=f"no perfect matching; unmatched V1 vertices {unmatched}")
    pairs = tuple((left[i], graph.n1 + m) for i, m in enumerate(match))
    return MatchingResult(True, pairs)


def structurally_singular(graph: WeightedGraph, p: int) -> bool:
    """True when ``det A_{G-p}`` vanishes for every choice of weights."""
    n1_rest = graph.n1 - 1
    if n1_rest > graph.n2:
        # the V1 rows of A_{G-p} live on only n2 columns
        return True
    if graph.balanced:
        return not has_matching_without(graph, p).exists
    return False


def det_without(graph: WeightedGraph, p: int) -> complex:
    """``det(A_{G-p})`` by pivoted LU; exactly 0 when structurally singular."""
    _require_v1(graph, p)
    if structurally_singular(graph, p):
        return 0j
    sub, _ = delete_vertex(graph, p)
    if sub.n == 0:
        return 1 + 0j
    return complex(np.linalg.det(adjacency(sub)))


def det_is_nonzero(graph: WeightedGraph, p: int, tolerance: float = ZERO_TOL) -> bool:
    """Numerical verdict on ``det(A_{G-p}) != 0``.

    Structural zeros are exact; otherwise the determinant counts as nonzero
    when ``A_{G-p}`` has no eigenvalue below the zero threshold, i.e. the same
    scale-aware test that :func:`nullity` uses.
    """
    _require_v1(graph, p)
    if structurally_singular(graph, p):
        return False
    sub, _ = delete_vertex(graph, p)
    if sub.n == 0:
        return True
    return nullity(adjacency(sub), tolerance) == 0


def randomize_weights(graph: WeightedGraph, seed: int) -> WeightedGraph:
    """Multiply edge ``i`` (canonical order) by an independent uniform draw from (0, 2]."""
    factors = 2.0 * (1.0 - uniforms(seed, "randomize_weights", len(graph.edges)))
    return graph.with_weights([w * f for (_, _, w), f in zip(graph.edges, factors)])


# -- the full report ---------------------------------------------------------

@dataclass(frozen=True)
class PartyCheck:
    party: int
    det_value: complex
    det_nonzero: bool
    matching_exists: bool
    matching: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class ViabilityReport:
    balanced: bool
    connected: bool
    per_party: tuple[PartyCheck, ...]
    zero_space_dim: int
    zero_vector: np.ndarray | None = field(default=None, compare=False)
    zero_support_ok: bool = False
    viable: bool = False

    def as_dict(self) -> dict:
        d = {
            "viable": self.viable,
            "balanced": self.balanced,
            "connected": self.connected,
            "zero_space_dim": self.zero_space_dim,
            "zero_support_ok": self.zero_support_ok,
        }
        for c in self.per_party:
            d[f"party.{c.party}.det"] = c.det_value.real if c.det_value.imag == 0 else c.det_value
            d[f"party.{c.party}.det_nonzero"] = c.det_nonzero
            d[f"party.{c.party}.matching"] = c.matching_exists
        if self.zero_vector is not None:
            d["zero_vector"] = " ".join(_fmt_complex(x) for x in self.zero_vector)
        return d

    def as_text(self) -> str:
        lines = [
            f"viable          {_yes(self.viable)}",
            f"balanced        {_yes(self.balanced)}",
            f"connected       {_yes(self.connected)}",
            f"zero space dim  {self.zero_space_dim}",
            f"party support   {_yes(self.zero_support_ok)}",
            "",
            f"{'party':>6}  {'det(A_G-p)':>14}  {'nonzero':>7}  {'matching':>8}",
        ]
        for c in self.per_party:
            lines.append(f"{c.party:>6}  {_fmt_complex(c.det_value):>14}  "
                         f"{_yes(c.det_nonzero):>7}  {_yes(c.matching_exists):>8}")
        return "\n".join(lines)

    def as_kv(self) -> str:
        return "\n".join(f"{k}={_kv(v)}" for k, v in self.as_dict().items())


def _yes(b: bool) -> str:
    return "yes" if b else "no"


def _kv(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, complex):
        return _fmt_complex(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _fmt_complex(x: complex) -> str:
    x = complex(x)
    if x.imag == 0:
        return f"{x.real:.10g}"
    return f"{x.real:.10g}{x.imag:+.10g}j"


def check_viability(graph: WeightedGraph, tolerance: float = ZERO_TOL) -> ViabilityReport:
    """Evaluate every transfer hypothesis; failures are reported, never raised."""
    A = adjacency(graph)
    dim = nullity(A, tolerance) if graph.n else 0
    z = graph_kernel(graph, tolerance) if dim == 1 else None
    checks = []
    for p in graph.parties:
        m = has_matching_without(graph, p)
        checks.append(PartyCheck(p, det_without(graph, p), det_is_nonzero(graph, p, tolerance),
                                 m.exists, m.pairs))
    support = bool(z is not None and graph.parties
                   and all(abs(z[p]) > SUPPORT_TOL for p in graph.parties))
    connected = is_connected(graph)
    viable = (graph.balanced and connected and bool(checks)
              and all(c.det_nonzero for c in checks) and dim == 1 and support)
    return ViabilityReport(graph.balanced, connected, tuple(checks), dim, z, support, viable)


# -- dangling-pair calculus --------------------------------------------------

def _dangling_candidates(graph: WeightedGraph):
    parties = set(graph.parties)
    for v in range(graph.n):
        if v in parties or graph.degree(v) != 1 or graph.has_self_loop(v):
            continue
        u = graph.neighbors[v][0]
        if u not in parties:
            yield v, u


def reduce_dangling(graph: WeightedGraph) -> tuple[WeightedGraph, list[tuple[int, int]]]:
    """Strip dangling pairs ``(v, u)`` (``v`` of degree one, ``u`` its neighbour).

    Neither vertex may be a party and the remainder must stay connected.  The
    lowest-id dangling vertex goes first.  The log lists removed pairs in the
    original ids.
    """
    current = graph
    original = list(range(graph.n))
    log = []
    while True:
        for v, u in _dangling_candidates(current):
            reduced, mapping = delete_vertices(current, (v, u))
            if is_connected(reduced):
                log.append((original[v], original[u]))
                original = [original[old] for old in sorted(mapping, key=mapping.get)]
                current = reduced
                break
        else:
            return current, log


@dataclass(frozen=True)
class Attachment:
    """How to hang a new pair ``u``-``v`` onto a graph.

    ``u`` joins part ``u_part`` (1 or 2) with the listed ``(vertex, weight)``
    edges to existing vertices and an optional real ``self_loop`` (V2 only);
    ``v`` joins the other part with a single edge ``A[u, v] = v_weight``.
    """

    u_part: int
    edges: tuple[tuple[int, complex], ...] = ()
    self_loop: float = 0.0
    v_weight: complex = 1.0


def extend_dangling(graph: WeightedGraph, attach: Attachment, new_party: bool = False,
                    tolerance: float = ZERO_TOL) -> WeightedGraph:
    """Add a vertex ``u`` wired per ``attach`` and a dangling ``v`` hanging off ``u``.

    New ids: the new V1 vertex is ``n1`` (end of V1), the new V2 vertex is the
    last id, and old V2 ids shift up by one.  The kernel dimension of the
    adjacency matrix is unchanged.  With ``new_party`` the vertex ``v`` joins the
    parties, which needs ``v`` in V1 and a nonzero kernel amplitude there.
    """
    if attach.u_part not in (1, 2):
        raise ValueError("u_part must be 1 or 2")
    if attach.u_part == 1 and attach.self_loop:
        raise SemiBipartiteViolation("a V1 vertex cannot carry a self-loop")
    n1, n = graph.n1, graph.n
    shift = {x: (x if x < n1 else x + 1) for x in range(n)}
    new_v1, new_v2 = n1, n + 1
    u, v = (new_v2, new_v1) if attach.u_part == 2 else (new_v1, new_v2)

    edges = [(shift[a], shift[b], w) for a, b, w in graph.edges]
    for x, w in attach.edges:
        if not 0 <= x < n:
            raise ValueError(f"attachment target {x} is not an existing vertex")
        edges.append((u, shift[x], w))
    if attach.self_loop:
        edges.append((u, u, attach.self_loop))
    edges.append((u, v, attach.v_weight))
    parties = [shift[p] for p in graph.parties]
    if new_party:
        if attach.u_part != 2:
            raise PartyPlacement("a new party must be a V1 vertex, so u must go in V2")
        parties.append(v)
    labels = None if graph.labels is None else (
        graph.labels[:n1] + (f"v{new_v1}",) + graph.labels[n1:] + (f"v{new_v2}",))
    extended = WeightedGraph(n1 + 1, graph.n2 + 1, tuple(edges), tuple(parties), labels)

    before = nullity(adjacency(graph), tolerance) if n else 0
    after = nullity(adjacency(extended), tolerance)
    assert before == after, f"nullity changed from {before} to {after}"

    if new_party:
        z_old = graph_kernel(graph, tolerance)
        coupling = sum(complex(w) * z_old[x] for x, w in attach.edges)
        z_v = -coupling / complex(attach.v_weight)
        if abs(z_v) / np.sqrt(1 + abs(z_v) ** 2) <= SUPPORT_TOL:
            raise PartyUnsupported(
                f"the new kernel vector vanishes on vertex {v} (b . z = {coupling:.3g})")
    return extended
