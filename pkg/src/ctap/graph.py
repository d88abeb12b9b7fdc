"""Weighted semi-bipartite graphs and their adjacency matrices.

Vertices are numbered ``0 .. n1-1`` for the part V1 and ``n1 .. n1+n2-1`` for
V2, so the adjacency matrix comes out in block form ``[[0, B], [B^H, C]]``.
Edges inside V1 are forbidden; edges and (real) self-loops inside V2 are fine.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateEdge,
    GraphError,
    GraphFormatError,
    NoSuchVertex,
    PartyPlacement,
    SemiBipartiteViolation,
)

Edge = tuple[int, int, complex]


@dataclass(frozen=True)
class WeightedGraph:
    """Immutable weighted semi-bipartite graph with a party set inside V1.

    Edges are stored canonically as ``(u, v, w)`` with ``u <= v``, sorted, where
    ``w`` is the matrix entry ``A[u, v]`` (so ``A[v, u] = conj(w)``).  Parties
    are stored sorted.
    """

    n1: int
    n2: int
    edges: tuple[Edge, ...] = ()
    parties: tuple[int, ...] = ()
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        n1, n2 = int(self.n1), int(self.n2)
        if n1 < 0 or n2 < 0:
            raise GraphError(f"part sizes must be non-negative, got ({n1}, {n2})")
        n = n1 + n2
        seen = set()
        canon = []
        for e in self.edges:
            u, v, w = int(e[0]), int(e[1]), complex(e[2])
            if not (0 <= u < n and 0 <= v < n):
                raise NoSuchVertex(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u > v:
                u, v, w = v, u, w.conjugate()
            if w == 0:
                raise GraphError(f"edge ({u}, {v}) has zero weight")
            if v < n1:
                kind = "self-loop on" if u == v else "edge inside"
                raise SemiBipartiteViolation(f"{kind} V1: ({u}, {v})")
            if u == v and w.imag != 0:
                raise GraphError(f"self-loop on {u} must have a real weight, got {w}")
            if (u, v) in seen:
                raise DuplicateEdge(f"edge ({u}, {v}) listed twice")
            seen.add((u, v))
            canon.append((u, v, w))
        canon.sort(key=lambda e: (e[0], e[1]))

        parties = [int(p) for p in self.parties]
        if len(set(parties)) != len(parties):
            raise PartyPlacement(f"parties must be distinct, got {parties}")
        for p in parties:
            if not 0 <= p < n1:
                raise PartyPlacement(f"party {p} is not a V1 vertex (V1 = 0..{n1 - 1})")
        labels = self.labels
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise GraphError(f"expected {n} labels, got {len(labels)}")
            for s in labels:
                if not s or s != s.strip() or "#" in s or "\n" in s:
                    raise GraphError(f"label {s!r} cannot be stored in the text format")

        object.__setattr__(self, "n1", n1)
        object.__setattr__(self, "n2", n2)
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "parties", tuple(sorted(parties)))
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def balanced(self) -> bool:
        return self.n1 == self.n2 + 1

    def in_v1(self, v: int) -> bool:
        return 0 <= v < self.n1

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Neighbour lists, excluding self-loops."""
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for u, v, _ in self.edges:
            if u != v:
                nb[u].add(v)
                nb[v].add(u)
        return tuple(tuple(sorted(s)) for s in nb)

    def has_self_loop(self, v: int) -> bool:
        return any(u == v == x for u, x, _ in self.edges)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def weight(self, u: int, v: int) -> complex:
        """Matrix entry ``A[u, v]``; zero if there is no edge."""
        for x, y, w in self.edges:
            if (x, y) == (u, v):
                return w
            if (x, y) == (v, u):
                return w.conjugate()
        return 0j

    def with_weights(self, weights: Sequence[complex]) -> "WeightedGraph":
        """Same structure and parties, new weights in canonical edge order."""
        if len(weights) != len(self.edges):
            raise GraphError(f"expected {len(self.edges)} weights, got {len(weights)}")
        edges = tuple((u, v, w) for (u, v, _), w in zip(self.edges, weights))
        return WeightedGraph(self.n1, self.n2, edges, self.parties, self.labels)

    def with_parties(self, parties: Iterable[int]) -> "WeightedGraph":
        return WeightedGraph(self.n1, self.n2, self.edges, tuple(parties), self.labels)


def build_graph(n1: int, n2: int, edges: Iterable[Sequence] = (), parties: Iterable[int] = (),
                labels: Sequence[str] | None = None) -> WeightedGraph:
    """Validate and build a graph; edges are ``(u, v, w)`` triples, or ``(u, v)`` for w = 1."""
    triples = []
    for e in edges:
        if len(e) == 2:
            triples.append((e[0], e[1], 1.0))
        else:
            triples.append(tuple(e))
    return WeightedGraph(n1, n2, tuple(triples), tuple(parties),
                         None if labels is None else tuple(labels))


def adjacency(graph: WeightedGraph) -> np.ndarray:
    """Dense hermitian adjacency matrix; real dtype when every weight is real."""
    real = all(w.imag == 0 for _, _, w in graph.edges)
    A = np.zeros((graph.n, graph.n), dtype=float if real else complex)
    for u, v, w in graph.edges:
        if real:
            A[u, v] = A[v, u] = w.real
        else:
            A[u, v] = w
            A[v, u] = w.conjugate()
    return A


def delete_vertex(graph: WeightedGraph, p: int) -> tuple[WeightedGraph, dict[int, int]]:
    """Remove vertex ``p`` and its edges.

    Returns the smaller graph and the map from surviving old ids to new ids.
    Part membership is preserved; a deleted party leaves the party set.
    """
    if not 0 <= p < graph.n:
        raise NoSuchVertex(f"vertex {p} not in graph with {graph.n} vertices")
    mapping = {}
    for v in range(graph.n):
        if v != p:
            mapping[v] = v if v < p else v - 1
    n1 = graph.n1 - 1 if p < graph.n1 else graph.n1
    n2 = graph.n2 if p < graph.n1 else graph.n2 - 1
    edges = tuple((mapping[u], mapping[v], w) for u, v, w in graph.edges
                  if u != p and v != p)
    parties = tuple(mapping[q] for q in graph.parties if q != p)
    labels = None
    if graph.labels is not None:
        labels = tuple(s for i, s in enumerate(graph.labels) if i != p)
    return WeightedGraph(n1, n2, edges, parties, labels), mapping


def delete_vertices(graph: WeightedGraph, vertices: Iterable[int]) -> tuple[WeightedGraph, dict[int, int]]:
    """Remove several vertices at once; returns the graph and old->new id map."""
    drop = set(vertices)
    for v in drop:
        if not 0 <= v < graph.n:
            raise NoSuchVertex(f"vertex {v} not in graph with {graph.n} vertices")
    keep = [v for v in range(graph.n) if v not in drop]
    mapping = {v: i for i, v in enumerate(keep)}
    n1 = sum(1 for v in keep if v < graph.n1)
    edges = tuple((mapping[u], mapping[v], w) for u, v, w in graph.edges
                  if u in mapping and v in mapping)
    parties = tuple(mapping[q] for q in graph.parties if q in mapping)
    labels = None if graph.labels is None else tuple(graph.labels[v] for v in keep)
    return WeightedGraph(n1, len(keep) - n1, edges, parties, labels), mapping


def bfs_distances(graph: WeightedGraph, source: int) -> list[float]:
    dist = [float("inf")] * graph.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors[u]:
            if dist[v] == float("inf"):
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def is_connected(graph: WeightedGraph) -> bool:
    """True iff the underlying graph is connected.  The empty graph is not."""
    if graph.n == 0:
        return False
    return all(d < float("inf") for d in bfs_distances(graph, 0))


def farthest_v1_pair(graph: WeightedGraph) -> tuple[int, int]:
    """Two V1 vertices at maximum finite distance, lowest ids on ties.

    Falls back to the two lowest V1 ids when no two V1 vertices are connected.
    """
    if graph.n1 < 2:
        raise GraphError("need at least two V1 vertices to choose a pair")
    best = (-1, 0, 1)
    for a in range(graph.n1):
        dist = bfs_distances(graph, a)
        for b in range(a + 1, graph.n1):
            if dist[b] < float("inf") and dist[b] > best[0]:
                best = (dist[b], a, b)
    return best[1], best[2]


# -- text format -------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def serialize_graph(graph: WeightedGraph) -> str:
    lines = [f"graph v1={graph.n1} v2={graph.n2}"]
    if graph.parties:
        lines.append("party " + " ".join(str(p) for p in graph.parties))
    if graph.labels is not None:
        for i, s in enumerate(graph.labels):
            lines.append(f"label {i} {s}")
    for u, v, w in graph.edges:
        line = f"edge {u} {v} {_fmt(w.real)}"
        if w.imag != 0:
            line += f" {_fmt(w.imag)}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> WeightedGraph:
    header = None
    parties: list[int] = []
    edges: list[Edge] = []
    labels: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        try:
            if key == "graph":
                fields = dict(tok.split("=", 1) for tok in rest)
                header = (int(fields["v1"]), int(fields["v2"]))
            elif key == "party":
                parties.extend(int(tok) for tok in rest)
            elif key == "edge":
                if len(rest) not in (3, 4):
                    raise ValueError("expected: edge <u> <v> <re> [<im>]")
                im = float(rest[3]) if len(rest) == 4 else 0.0
                edges.append((int(rest[0]), int(rest[1]), complex(float(rest[2]), im)))
            elif key == "label":
                idx, _, name = line[len("label"):].strip().partition(" ")
                labels[int(idx)] = name
            else:
                raise ValueError(f"unknown directive {key!r}")
        except (ValueError, KeyError) as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from exc
    if header is None:
        raise GraphFormatError("missing 'graph v1=<n1> v2=<n2>' header")
    n1, n2 = header
    label_tuple = None
    if labels:
        if sorted(labels) != list(range(n1 + n2)):
            raise GraphFormatError("labels must be given for every vertex")
        label_tuple = tuple(labels[i] for i in range(n1 + n2))
    return WeightedGraph(n1, n2, tuple(edges), tuple(parties), label_tuple)


def read_graph(path: str | Path) -> WeightedGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def write_graph(graph: WeightedGraph, path: str | Path) -> None:
    Path(path).write_text(serialize_graph(graph), encoding="utf-8")
