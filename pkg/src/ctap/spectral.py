"""Spectra, the gap around the zero eigenvalue, and cheap lower bounds on it."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateKernel, InterlacingViolation, NoMatching
from .graph import WeightedGraph, adjacency, delete_vertex
from .matching import hopcroft_karp
from .rng import uniforms
from .viability import ZERO_TOL, check_hermitian, det_without, zero_threshold

INTERLACE_TOL = 1e-8


def spectrum(matrix: np.ndarray) -> np.ndarray:
    """All eigenvalues of a hermitian matrix, ascending."""
    A = np.asarray(matrix)
    check_hermitian(A)
    return np.linalg.eigvalsh(A)


def _gap_from_eigenvalues(lam: np.ndarray, tolerance: float, allow_degenerate: bool) -> float:
    a = np.abs(lam)
    zero = a < zero_threshold(lam, tolerance)
    if zero.sum() != 1 and not allow_degenerate:
        raise DegenerateKernel(int(zero.sum()))
    rest = a[~zero]
    return float(rest.min()) if rest.size else float("inf")


def gap_around_zero(matrix: np.ndarray, tolerance: float = ZERO_TOL,
                    allow_degenerate: bool = False) -> float:
    """Smallest ``|lambda|`` among the eigenvalues not classified as zero.

    Requires a one-dimensional kernel unless ``allow_degenerate`` is set.
    """
    return _gap_from_eigenvalues(spectrum(matrix), tolerance, allow_degenerate)


def interlaces(lam: np.ndarray, mu: np.ndarray, tol: float) -> bool:
    """Cauchy interlacing ``lam[i] <= mu[i] <= lam[i+1]`` up to ``tol``."""
    return bool(np.all(lam[:-1] <= mu + tol) and np.all(mu <= lam[1:] + tol))


@dataclass(frozen=True)
class InterlacingBound:
    value: float
    party: int
    per_party: dict


def interlacing_gap_bound(graph: WeightedGraph, tolerance: float = ZERO_TOL) -> InterlacingBound:
    """``max_p min |mu|`` over parties ``p`` and eigenvalues ``mu`` of ``A_{G-p}``.

    Also checks the full interlacing chain against the spectrum of ``A_G``
    and raises :class:`InterlacingViolation` if it fails.
    """
    if not graph.parties:
        raise ValueError("graph has no parties")
    lam = spectrum(adjacency(graph))
    _gap_from_eigenvalues(lam, tolerance, allow_degenerate=False)
    tol = INTERLACE_TOL * max(1.0, np.max(np.abs(lam)))
    per_party = {}
    for p in graph.parties:
        sub, _ = delete_vertex(graph, p)
        mu = spectrum(adjacency(sub))
        if not interlaces(lam, mu, tol):
            raise InterlacingViolation(f"eigenvalues of A_G-{p} do not interlace those of A_G")
        per_party[p] = float(np.min(np.abs(mu))) if mu.size else float("inf")
    best = max(per_party, key=lambda p: (per_party[p], -p))
    return InterlacingBound(per_party[best], best, per_party)


def max_degree(graph: WeightedGraph) -> int:
    """Largest number of nonzero entries in a row of the adjacency matrix."""
    if graph.n == 0:
        return 0
    return max(graph.degree(v) + graph.has_self_loop(v) for v in range(graph.n))


@dataclass(frozen=True)
class DetBound:
    party: int
    bound: float
    min_abs_mu: float
    d_max: int


def det_eigen_lower_bound(graph: WeightedGraph) -> list[DetBound]:
    """``|det A_{G-p}| / d_max(G-p)^(n-2)`` per party, next to the true ``min |mu|``.

    Valid as a lower bound on ``min |mu|`` when all weights have modulus <= 1;
    a warning is issued otherwise.
    """
    if any(abs(w) > 1 for _, _, w in graph.edges):
        warnings.warn("weights exceed 1 in modulus; the determinant bound may not hold",
                      stacklevel=2)
    out = []
    for p in graph.parties:
        sub, _ = delete_vertex(graph, p)
        order = sub.n
        mu = spectrum(adjacency(sub))
        d = max_degree(sub)
        det = abs(det_without(graph, p))
        if order <= 1:
            bound = det
        elif d == 0:
            bound = 0.0
        else:
            bound = det / float(d) ** (order - 1)
        out.append(DetBound(p, float(bound), float(np.min(np.abs(mu))) if order else float("inf"), d))
    return out


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    zero_index: int | None
    gap: float
    det_bound: dict
    interlacing_bound: float | None


def spectral_report(graph: WeightedGraph, tolerance: float = ZERO_TOL) -> SpectralReport:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lam = spectrum(adjacency(graph))
        zero = np.abs(lam) < zero_threshold(lam, tolerance)
        zero_index = int(np.argmax(zero)) if zero.sum() == 1 else None
        gap = _gap_from_eigenvalues(lam, tolerance, allow_degenerate=True)
        det_bound = {b.party: b.bound for b in det_eigen_lower_bound(graph)}
        ib = None
        if zero_index is not None and graph.parties:
            ib = interlacing_gap_bound(graph, tolerance).value
    return SpectralReport(lam, zero_index, gap, det_bound, ib)


# -- random-determinant bound ------------------------------------------------

def perfect_matching(graph: WeightedGraph) -> list[tuple[int, int]]:
    """A perfect matching of the whole graph, or :class:`NoMatching`."""
    if graph.n1 == graph.n2:
        adj = [[v - graph.n1 for v in graph.neighbors[u] if v >= graph.n1] for u in range(graph.n1)]
        match = hopcroft_karp(graph.n1, graph.n2, adj)
        if all(m >= 0 for m in match):
            return [(u, graph.n1 + m) for u, m in enumerate(match)]
    if graph.n1 <= graph.n2 and graph.n % 2 == 0:
        # V2-V2 edges may be needed; fall back to general matching
        import networkx as nx

        G = nx.Graph()
        G.add_nodes_from(range(graph.n))
        G.add_edges_from((u, v) for u, v, _ in graph.edges if u != v)
        m = nx.max_weight_matching(G, maxcardinality=True)
        if 2 * len(m) == graph.n:
            return sorted(tuple(sorted(e)) for e in m)
    raise NoMatching("graph has no perfect matching")


@dataclass(frozen=True)
class MonteCarloBound:
    matching_size: int
    threshold: float        # (1/2)^(3l - 1)
    guaranteed: float       # (1/2)^l
    probability: float      # empirical P(|det| > threshold)
    sigma: float
    trials: int

    @property
    def holds(self) -> bool:
        return self.probability >= self.guaranteed - 3 * self.sigma


def det_bound_montecarlo(graph: WeightedGraph, trials: int, seed: int = 0,
                         chunk: int = 20000) -> MonteCarloBound:
    """Estimate ``P(|det A_G| > (1/2)^(3l-1))`` with matched weights ~ U[0, 1].

    ``l`` is the size of a perfect matching; the weights of the matched edges
    are redrawn each trial, all other weights are kept.
    """
    pairs = perfect_matching(graph)
    ell = len(pairs)
    base = adjacency(graph).astype(complex)
    draws = uniforms(seed, "det_bound", trials * ell).reshape(trials, ell)
    rows = np.array([u for u, _ in pairs])
    cols = np.array([v for _, v in pairs])
    threshold = 0.5 ** (3 * ell - 1)
    hits = 0
    for start in range(0, trials, chunk):
        w = draws[start:start + chunk]
        mats = np.broadcast_to(base, (len(w),) + base.shape).copy()
        mats[:, rows, cols] = w
        mats[:, cols, rows] = w
        hits += int(np.sum(np.abs(np.linalg.det(mats)) > threshold))
    prob = hits / trials
    sigma = float(np.sqrt(max(prob * (1 - prob), 1e-12) / trials))
    return MonteCarloBound(ell, threshold, 0.5 ** ell, prob, sigma, trials)
