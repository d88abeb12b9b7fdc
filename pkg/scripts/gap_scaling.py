"""Mean zero gap against graph size for every family, with log-log slopes.

    python3 scripts/gap_scaling.py --out results/gap_scaling.csv [--plot gap.png]
"""
import argparse

from ctap.experiments import SweepConfig, default_jobs, loglog_slopes, run_sweep, write_sweep_csv

FAMILIES = (
    ("path", tuple(range(3, 42, 2))),
    ("star", (2, 4, 6, 8, 10, 12)),
    ("subdivided_tree", (1, 2, 3, 4, 5)),
    ("hex_grid", (2, 3, 4, 5, 6)),
    ("square_grid", (3, 5, 7)),
    ("random_bipartite", (2, 4, 6, 8, 12, 16)),
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=default_jobs())
    ap.add_argument("--out", default="gap_scaling.csv")
    ap.add_argument("--plot", help="write a log-log figure here (needs matplotlib)")
    args = ap.parse_args()

    cfg = SweepConfig("gap_scaling", families=FAMILIES, trials=args.trials, seed=args.seed,
                      jobs=args.jobs)
    result = run_sweep(cfg)
    write_sweep_csv(result.rows, args.out)
    by_family = {}
    for r in result.rows:
        by_family.setdefault(r.family, []).append(r)
    for fam, rows in by_family.items():
        slopes = loglog_slopes([r.n_vertices for r in rows], [r.value for r in rows])
        print(f"{fam:17s} |V| {rows[0].n_vertices:>4}..{rows[-1].n_vertices:<5} "
              f"local slopes {' '.join(f'{s:+.2f}' for s in slopes)}")
    for f in result.failures:
        print("failed:", f)

    if args.plot:
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4.5))
        for fam, rows in by_family.items():
            ax.loglog([r.n_vertices for r in rows], [r.value for r in rows], "o-", label=fam, ms=3)
        ns = sorted({r.n_vertices for r in result.rows})
        ax.loglog(ns, [1 / n for n in ns], "k--", label="1/|V|")
        ax.set_xlabel("|V|")
        ax.set_ylabel("mean gap around zero")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
