"""Batch sweeps: gap scaling across graph families and T* on subdivided trees.

Results are plain rows written to CSV with a fixed header.  Points are
independent, so they may run in worker processes; rows always come back in
config order.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .errors import CtapError, DegenerateKernel, TStarNotFound
from .generators import SIZE_PARAM, FamilySpec, generate, subdivided_tree
from .graph import adjacency
from .spectral import det_eigen_lower_bound, gap_around_zero, interlacing_gap_bound
from .viability import randomize_weights
from .dynamics import find_tstar

log = logging.getLogger(__name__)

SCHEMA = "# schema: ctap-sweep v1"
GAP_SCAN_SCHEMA = "# schema: ctap-gap-scan v1"
# families whose unit-weight versions are scanned with randomised weights by default
RANDOMIZED = frozenset({"hex_grid", "square_grid", "random_bipartite"})


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    families: tuple[tuple[str, tuple[int, ...]], ...] = ()
    params: dict = field(default_factory=dict)
    trials: int = 50
    randomize: bool | None = None
    depths: tuple[int, ...] = ()
    straddles: tuple[float, ...] = (1.0,)
    arity: int = 2
    threshold: float = 0.05
    steps_per_unit_time: float = 20.0
    cap: float = 1e5
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.experiment not in ("gap_scaling", "tree_tstar"):
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        if self.experiment == "gap_scaling":
            if not self.families or any(not sizes for _, sizes in self.families):
                raise ValueError("gap_scaling needs at least one family with a nonempty size range")
        elif not self.depths or not self.straddles:
            raise ValueError("tree_tstar needs nonempty depth and straddle lists")


@dataclass(frozen=True)
class SweepRow:
    experiment: str
    family: str
    param: int
    straddle: float
    n_vertices: int
    n_parties: int
    metric: str
    value: float
    dispersion: float
    seed_count: int
    ref_inv_v: float
    ref_curve: float
    status: str = "ok"
    wall_time: float = 0.0


@dataclass(frozen=True)
class GapPoint:
    family: str
    param: int
    n_vertices: int
    n_parties: int
    seed_count: int
    gap_mean: float
    gap_std: float
    interlacing_bound: float
    det_bound: float
    skipped: int = 0


def gap_point(family: str, size: int, trials: int = 50, seed: int = 0,
              randomize: bool | None = None, params: dict | None = None) -> GapPoint:
    """Mean and spread of the zero gap for one family member.

    Randomised points average over ``trials`` seeds ``seed, seed + 1, ...``
    (each seed draws both the edge set of random families and the weight
    factors).  Trials whose kernel is not one-dimensional are dropped.
    """
    if randomize is None:
        randomize = family in RANDOMIZED
    extra = dict(params or {})
    extra[SIZE_PARAM[family]] = size
    seeds = [seed + i for i in range(trials)] if randomize else [seed]
    gaps, ib, db = [], [], []
    n = n_parties = 0
    for sd in seeds:
        g = generate(FamilySpec(family, extra, sd))
        if randomize:
            g = randomize_weights(g, sd)
        n, n_parties = g.n, len(g.parties)
        try:
            gaps.append(gap_around_zero(adjacency(g)))
        except DegenerateKernel:
            log.warning("%s size %d seed %d: degenerate kernel, trial dropped", family, size, sd)
            continue
        if g.parties:
            ib.append(interlacing_gap_bound(g).value)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                db.append(max(b.bound for b in det_eigen_lower_bound(g)))
    if not gaps:
        raise DegenerateKernel(0)
    return GapPoint(family, size, n, n_parties, len(gaps), float(np.mean(gaps)),
                    float(np.std(gaps)), float(np.mean(ib)) if ib else math.nan,
                    float(np.mean(db)) if db else math.nan, len(seeds) - len(gaps))


@dataclass
class SweepResult:
    rows: list
    failures: list = field(default_factory=list)

    @property
    def partial(self) -> bool:
        return bool(self.failures)


def _run_tasks(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _gap_task(task):
    family, size, trials, seed, randomize, params = task
    t0 = time.perf_counter()
    try:
        point = gap_point(family, size, trials, seed, randomize, params)
    except (CtapError, ValueError) as exc:
        return None, f"{family} size {size}: {exc}"
    return (point, time.perf_counter() - t0), None


def gap_points(config: SweepConfig) -> tuple[list[tuple[GapPoint, float]], list[str]]:
    tasks = [(fam, size, config.trials, config.seed, config.randomize, config.params)
             for fam, sizes in config.families for size in sizes]
    points, failures = [], []
    for out, err in _run_tasks(_gap_task, tasks, config.jobs):
        if err:
            log.error("gap point skipped: %s", err)
            failures.append(err)
        else:
            points.append(out)
    return points, failures


def run_gap_scaling(config: SweepConfig) -> SweepResult:
    """One row per (family, size): mean gap, its standard deviation, and the
    ``1/|V|`` and ``10/sqrt|V|`` reference values."""
    points, failures = gap_points(config)
    rows = [SweepRow("gap_scaling", p.family, p.param, 1.0, p.n_vertices, p.n_parties, "gap",
                     p.gap_mean, p.gap_std, p.seed_count, 1.0 / p.n_vertices,
                     10.0 / math.sqrt(p.n_vertices), "ok", wall)
            for p, wall in points]
    return SweepResult(rows, failures)


def _tstar_task(task):
    arity, depth, s, threshold, spu, cap = task
    g = subdivided_tree(arity, depth)
    a, b = g.parties[0], g.parties[-1]
    t0 = time.perf_counter()
    try:
        value, status = find_tstar(g, a, b, s=s, threshold=threshold,
                                   steps_per_unit_time=spu, cap=cap).tstar, "ok"
    except TStarNotFound:
        value, status = math.nan, "tstar_not_found"
    ref = 10.0 * math.sqrt(depth) if depth > 0 else math.nan
    return SweepRow("tree_tstar", "subdivided_tree", depth, s, g.n, len(g.parties), "tstar",
                    value, 0.0, 1, 1.0 / g.n, ref, status, time.perf_counter() - t0)


def run_tree_tstar(config: SweepConfig) -> SweepResult:
    """T* between the two outermost leaves for each (depth, straddle) pair.

    The parties are the tree's leaves; the first and last leaf are at maximum
    distance.  The reference column is ``10 sqrt(k)``.
    """
    tasks = [(config.arity, k, float(s), config.threshold, config.steps_per_unit_time, config.cap)
             for k in config.depths for s in config.straddles]
    rows = _run_tasks(_tstar_task, tasks, config.jobs)
    failures = [f"depth {r.param} straddle {r.straddle:g}: {r.status}" for r in rows if r.status != "ok"]
    return SweepResult(rows, failures)


def run_sweep(config: SweepConfig) -> SweepResult:
    if config.experiment == "gap_scaling":
        return run_gap_scaling(config)
    return run_tree_tstar(config)


# -- CSV ---------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _write(header_line: str, columns: list[str], records: list[dict], path=None) -> str:
    buf = io.StringIO()
    buf.write(header_line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_cell(rec[c]) for c in columns])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


SWEEP_COLUMNS = [f.name for f in fields(SweepRow)]
GAP_SCAN_COLUMNS = ["family", "param", "n_vertices", "seed_count", "gap_mean", "gap_std",
                    "interlacing_bound", "det_bound"]


def write_sweep_csv(rows, path=None) -> str:
    return _write(SCHEMA, SWEEP_COLUMNS, [asdict(r) for r in rows], path)


def write_gap_scan_csv(points, path=None) -> str:
    return _write(GAP_SCAN_SCHEMA, GAP_SCAN_COLUMNS, [asdict(p) for p in points], path)


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("CTAP_JOBS", "1")))
    except ValueError:
        return 1


def loglog_slopes(sizes, values) -> np.ndarray:
    """Local slopes ``d log(value) / d log(size)`` between consecutive points."""
    x, y = np.log(np.asarray(sizes, float)), np.log(np.asarray(values, float))
    return np.diff(y) / np.diff(x)


def loglog_fit(sizes, values) -> float:
    """Least-squares slope of ``log(value)`` against ``log(size)``."""
    return float(np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(values, float)), 1)[0])
