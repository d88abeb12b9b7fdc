"""Graph families with canonical party sets.

Every generator returns a graph with V1 listed first, unit weights, and (for
the families where it is possible) ``|V1| = |V2| + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidParameter
from .graph import WeightedGraph, farthest_v1_pair
from .rng import uniforms

FAMILIES = ("subdivided_tree", "hex_grid", "square_grid", "star", "random_bipartite", "path")


def _from_coloring(sites: list, color: dict, edges: list, v1_color) -> tuple[WeightedGraph, dict]:
    """Relabel ``sites`` so that sites with ``color == v1_color`` come first."""
    v1 = [s for s in sites if color[s] == v1_color]
    v2 = [s for s in sites if color[s] != v1_color]
    index = {s: i for i, s in enumerate(v1 + v2)}
    g = WeightedGraph(len(v1), len(v2), tuple((index[a], index[b], 1.0) for a, b in edges))
    return g, index


def _with_farthest_parties(g: WeightedGraph) -> WeightedGraph:
    if g.n1 < 2:
        return g.with_parties(range(g.n1))
    return g.with_parties(farthest_v1_pair(g))


def path(n: int) -> WeightedGraph:
    """Path on ``n`` (odd) vertices; parties are the two endpoints."""
    if n < 1 or n % 2 == 0:
        raise InvalidParameter(f"path length must be odd and positive, got {n}")
    n1 = (n + 1) // 2
    # chain position i -> id: even positions fill V1, odd positions fill V2
    ids = [i // 2 if i % 2 == 0 else n1 + i // 2 for i in range(n)]
    edges = tuple((ids[i], ids[i + 1], 1.0) for i in range(n - 1))
    parties = (0, n1 - 1) if n1 > 1 else (0,)
    return WeightedGraph(n1, n - n1, edges, parties)


def subdivided_tree(arity: int, depth: int) -> WeightedGraph:
    """Complete ``arity``-ary tree of the given depth with every edge subdivided.

    Tree vertices (BFS order) form V1, the subdivision vertices form V2, and
    the parties are the leaves of the original tree.
    """
    if arity < 1 or depth < 0:
        raise InvalidParameter(f"need arity >= 1 and depth >= 0, got ({arity}, {depth})")
    n_tree = sum(arity ** d for d in range(depth + 1))
    parent = [-1] + [(c - 1) // arity for c in range(1, n_tree)]
    # the subdivision vertex of edge (parent[c], c) gets id n_tree + c - 1
    edges = []
    for c in range(1, n_tree):
        mid = n_tree + c - 1
        edges.append((parent[c], mid, 1.0))
        edges.append((c, mid, 1.0))
    first_leaf = n_tree - arity ** depth
    leaves = tuple(range(first_leaf, n_tree))
    return WeightedGraph(n_tree, n_tree - 1, tuple(edges), leaves)


def hex_grid(k: int) -> WeightedGraph:
    """Honeycomb patch of ``k x k`` two-site cells with the top-right site removed.

    Cell ``(r, c)`` holds an A site (V1) and a B site (V2) bonded together;
    B(r, c) also bonds to A(r, c + 1) and A(r + 1, c).  Every cell is therefore
    the same orientation, faces are hexagons and the degree is at most 3.
    Dropping B(k - 1, k - 1) leaves ``2k^2 - 1`` sites.  Built cell by cell,
    each new B site hangs off its A site, so the patch stays viable.
    """
    if k < 1:
        raise InvalidParameter(f"hex grid size must be >= 1, got {k}")
    cells = [(r, c) for r in range(k) for c in range(k)]
    a_id = {cell: i for i, cell in enumerate(cells)}
    b_cells = cells[:-1]
    b_id = {cell: k * k + i for i, cell in enumerate(b_cells)}
    edges = []
    for r, c in b_cells:
        b = b_id[(r, c)]
        edges.append((a_id[(r, c)], b, 1.0))
        if c + 1 < k:
            edges.append((a_id[(r, c + 1)], b, 1.0))
        if r + 1 < k:
            edges.append((a_id[(r + 1, c)], b, 1.0))
    return _with_farthest_parties(WeightedGraph(k * k, k * k - 1, tuple(edges)))


def square_grid(k: int) -> WeightedGraph:
    """``k x k`` grid (``k`` odd); V1 is the colour class of the corners."""
    if k < 1 or k % 2 == 0:
        raise InvalidParameter(f"square grid size must be odd, got {k}")
    sites = [(i, j) for i in range(k) for j in range(k)]
    edges = []
    for i, j in sites:
        if j + 1 < k:
            edges.append(((i, j), (i, j + 1)))
        if i + 1 < k:
            edges.append(((i, j), (i + 1, j)))
    color = {s: (s[0] + s[1]) % 2 for s in sites}
    g, _ = _from_coloring(sites, color, edges, v1_color=0)
    return _with_farthest_parties(g)


def star(arms: int, arm_length: int) -> WeightedGraph:
    """``arms`` chains of ``arm_length`` sites hung off a centre vertex in V1.

    The arm length must be even: then the arm endpoints land in V1 and become
    the parties, and ``|V1| = |V2| + 1``.
    """
    if arms < 1 or arm_length < 1:
        raise InvalidParameter(f"need arms >= 1 and arm_length >= 1, got ({arms}, {arm_length})")
    if arm_length % 2:
        raise InvalidParameter(
            f"arm_length={arm_length} is odd: the arm endpoints would sit in V2 and "
            f"|V1| = {1 + arms * (arm_length // 2)} != |V2| + 1 = {arms * (arm_length // 2 + 1) + 1}")
    sites = [("c", 0)] + [(a, d) for a in range(arms) for d in range(1, arm_length + 1)]
    edges = []
    for a in range(arms):
        prev = ("c", 0)
        for d in range(1, arm_length + 1):
            edges.append((prev, (a, d)))
            prev = (a, d)
    color = {s: s[1] % 2 for s in sites}
    g, index = _from_coloring(sites, color, edges, v1_color=0)
    return g.with_parties(index[(a, arm_length)] for a in range(arms))


def random_bipartite(m: int, p: float, seed: int) -> WeightedGraph:
    """Random bipartite graph with parts of size ``m + 1`` and ``m``.

    Cross edge ``(i, j)`` (index ``i * m + j``) is present iff its uniform draw
    is below ``p``.  Parties are two farthest-apart V1 vertices.
    """
    if m < 1:
        raise InvalidParameter(f"m must be >= 1, got {m}")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"edge probability must lie in [0, 1], got {p}")
    n1 = m + 1
    draws = uniforms(seed, "random_bipartite", n1 * m)
    edges = tuple((i, n1 + j, 1.0) for i in range(n1) for j in range(m)
                  if draws[i * m + j] < p)
    return _with_farthest_parties(WeightedGraph(n1, m, edges))


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameter(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.family == "square_grid" and int(self.params.get("k", 1)) % 2 == 0:
            raise InvalidParameter("square_grid size k must be odd")
        if self.family == "random_bipartite" and not 0 <= float(self.params.get("p", 0.81)) <= 1:
            raise InvalidParameter("random_bipartite probability p must lie in [0, 1]")


# the single "size" parameter each family is swept over
SIZE_PARAM = {
    "subdivided_tree": "depth",
    "hex_grid": "k",
    "square_grid": "k",
    "star": "m",
    "random_bipartite": "m",
    "path": "n",
}


def generate(spec: FamilySpec) -> WeightedGraph:
    """Build the graph described by ``spec``; missing parameters take the family defaults."""
    p = spec.params
    f = spec.family
    if f == "subdivided_tree":
        return subdivided_tree(int(p.get("arity", 2)), int(p["depth"]))
    if f == "hex_grid":
        return hex_grid(int(p["k"]))
    if f == "square_grid":
        return square_grid(int(p["k"]))
    if f == "star":
        return star(int(p.get("arms", 3)), int(p["m"]))
    if f == "random_bipartite":
        return random_bipartite(int(p["m"]), float(p.get("p", 0.81)), spec.seed)
    return path(int(p["n"]))
