"""Command-line interface: generate, check, gap-scan, simulate, tstar, sweep.

Exit codes: 0 success, 1 validation or usage error, 2 sweep finished with
failed points.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .dynamics import default_schedule, evolve, find_tstar, sequential_schedule
from .errors import CtapError
from .experiments import (
    SweepConfig,
    default_jobs,
    gap_points,
    run_sweep,
    write_gap_scan_csv,
    write_sweep_csv,
)
from .generators import FAMILIES, FamilySpec, generate
from .graph import adjacency, read_graph, serialize_graph
from .viability import check_viability, randomize_weights

EXIT_OK, EXIT_INVALID, EXIT_PARTIAL = 0, 1, 2
# sizes each family accepts step through these by default
_DEFAULT_STEP = {"path": 2, "square_grid": 2, "star": 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_range(text: str, step: int = 1) -> tuple[int, ...]:
    """``"a..b"``, ``"a..b:step"`` or ``"a,b,c"`` to a tuple of ints."""
    text = text.strip()
    if ".." in text:
        lo, _, rest = text.partition("..")
        hi, _, st = rest.partition(":")
        values = tuple(range(int(lo), int(hi) + 1, int(st) if st else step))
    else:
        values = tuple(int(x) for x in text.split(",") if x)
    if not values:
        raise ValueError(f"empty range {text!r}")
    return values


def parse_params(text: str | None) -> dict:
    out = {}
    for item in (text or "").split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"bad parameter {item!r}, expected key=value")
        out[key.strip()] = float(value) if "." in value else int(value)
    return out


def read_config(path: str) -> dict:
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                key, _, value = line.partition("=")
                cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctap", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a graph from a named family")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--params", default="", help="e.g. k=3 or depth=2,arity=2 or m=5,p=0.81")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("check", help="report the viability of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--randomize", action="store_true", help="multiply weights by U(0, 2] first")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gap-scan", help="zero-gap scaling over a size range")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--sizes", required=True, help="a..b, a..b:step or a,b,c")
    p.add_argument("--params", default="", help="extra family parameters, e.g. arms=3,p=0.81")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    w = p.add_mutually_exclusive_group()
    w.add_argument("--randomize", dest="randomize", action="store_true", default=None)
    w.add_argument("--unit-weights", dest="randomize", action="store_false")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="run one transfer")
    p.add_argument("--graph", required=True)
    p.add_argument("--from", dest="a", type=int, required=True)
    p.add_argument("--to", dest="b", type=int, required=True)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--straddle", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--schedule", choices=("default", "sequential"), default="default")
    p.add_argument("--trace", help="write a per-step CSV trace here")

    p = sub.add_parser("tstar", help="minimal protocol time for a target error")
    p.add_argument("--graph", required=True)
    p.add_argument("--from", dest="a", type=int, required=True)
    p.add_argument("--to", dest="b", type=int, required=True)
    p.add_argument("--straddle", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--steps-per-unit", type=float, default=20.0)
    p.add_argument("--cap", type=float, default=1e5)

    p = sub.add_parser("sweep", help="batch experiment to CSV")
    p.add_argument("--config", help="key=value file supplying defaults for the options below")
    p.add_argument("--experiment", choices=("gap_scaling", "tree_tstar"))
    p.add_argument("--family", action="append", choices=FAMILIES, help="repeatable (gap_scaling)")
    p.add_argument("--sizes", help="size range for every --family (gap_scaling)")
    p.add_argument("--params")
    p.add_argument("--trials", type=int)
    p.add_argument("--depths", help="tree depths (tree_tstar)")
    p.add_argument("--straddle", help="comma-separated straddle factors (tree_tstar)")
    p.add_argument("--threshold", type=float)
    p.add_argument("--cap", type=float, help="largest protocol time tried (tree_tstar)")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out")
    return parser


def _sizes(family: str, text: str) -> tuple[int, ...]:
    return parse_range(text, _DEFAULT_STEP.get(family, 1))


def cmd_generate(args) -> int:
    g = generate(FamilySpec(args.family, parse_params(args.params), args.seed))
    text = serialize_graph(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    g = read_graph(args.graph)
    if args.randomize:
        g = randomize_weights(g, args.seed)
    report = check_viability(g)
    print(report.as_text())
    print()
    print(report.as_kv())
    return EXIT_OK


def cmd_gap_scan(args) -> int:
    cfg = SweepConfig("gap_scaling", ((args.family, _sizes(args.family, args.sizes)),),
                      parse_params(args.params), args.trials, args.randomize, seed=args.seed,
                      jobs=args.jobs or default_jobs())
    points, failures = gap_points(cfg)
    text = write_gap_scan_csv([p for p, _ in points], args.out)
    if not args.out:
        sys.stdout.write(text)
    for f in failures:
        print(f"skipped: {f}", file=sys.stderr)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_simulate(args) -> int:
    g = read_graph(args.graph)
    factory = default_schedule if args.schedule == "default" else sequential_schedule
    schedule = factory(g, args.a, args.b, args.time, args.straddle)
    res = evolve(schedule, adjacency(g), args.steps, trace=bool(args.trace))
    for key in ("error", "acquired_phase", "predicted_phase", "v2_population_max",
                "unitarity_defect", "zero_energy_residual", "kernel_unique", "steps"):
        val = getattr(res, key)
        print(f"{key}={str(val).lower() if isinstance(val, bool) else val}")
    if args.trace:
        _write_trace(res.trace, g.n, args.trace)
    return EXIT_OK


def _write_trace(rec, n, path):
    n1 = rec["controls"].shape[1]
    header = ["t"] + [f"pop_{v}" for v in range(n)] + ["gap"] + [f"f_{v}" for v in range(n1)]
    data = np.column_stack([rec["t"], rec["population"], rec["gap"], rec["controls"]])
    np.savetxt(path, data, delimiter=",", header=",".join(header), comments="", fmt="%.10g")


def cmd_tstar(args) -> int:
    g = read_graph(args.graph)
    res = find_tstar(g, args.a, args.b, s=args.straddle, threshold=args.threshold,
                     steps_per_unit_time=args.steps_per_unit, cap=args.cap)
    print(f"tstar={res.tstar!r}")
    print(f"error={res.error!r}")
    print(f"probes={len(res.probes)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = read_config(args.config) if args.config else {}

    def opt(name, default=None):
        value = getattr(args, name)
        return cfg.get(name, default) if value is None else value

    experiment = opt("experiment")
    if experiment is None:
        raise UsageError("sweep: --experiment is required (or set experiment= in --config)")
    jobs = int(opt("jobs", default_jobs()))
    seed = int(opt("seed", 0))
    threshold = float(opt("threshold", 0.05))
    if experiment == "gap_scaling":
        fams = args.family or [f for f in str(cfg.get("family", "")).split(",") if f]
        sizes = opt("sizes")
        if not fams or sizes is None:
            raise UsageError("sweep gap_scaling needs --family and --sizes")
        config = SweepConfig("gap_scaling", tuple((f, _sizes(f, sizes)) for f in fams),
                             parse_params(opt("params", "")), int(opt("trials", 50)),
                             threshold=threshold, seed=seed, jobs=jobs)
    else:
        depths = opt("depths")
        if depths is None:
            raise UsageError("sweep tree_tstar needs --depths")
        straddles = tuple(float(s) for s in str(opt("straddle", "1")).split(","))
        config = SweepConfig("tree_tstar", depths=parse_range(depths), straddles=straddles,
                             threshold=threshold, cap=float(opt("cap", 1e5)), seed=seed, jobs=jobs)
    result = run_sweep(config)
    out = opt("out")
    text = write_sweep_csv(result.rows, out)
    if not out:
        sys.stdout.write(text)
    for f in result.failures:
        print(f"failed: {f}", file=sys.stderr)
    return EXIT_PARTIAL if result.partial else EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "check": cmd_check,
    "gap-scan": cmd_gap_scan,
    "simulate": cmd_simulate,
    "tstar": cmd_tstar,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except (CtapError, ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
