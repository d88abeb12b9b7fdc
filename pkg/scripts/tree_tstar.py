"""T* for transfer between the outermost leaves of subdivided binary trees.

    python3 scripts/tree_tstar.py --depths 1..5 --straddle 1,10 --out tree.csv
"""
import argparse

from ctap.cli import parse_range
from ctap.experiments import SweepConfig, default_jobs, run_sweep, write_sweep_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depths", default="1..4")
    ap.add_argument("--straddle", default="1,10")
    ap.add_argument("--threshold", type=float, default=0.05)
    ap.add_argument("--jobs", type=int, default=default_jobs())
    ap.add_argument("--out", default="tree_tstar.csv")
    ap.add_argument("--plot", help="write a figure here (needs matplotlib)")
    args = ap.parse_args()

    straddles = tuple(float(s) for s in args.straddle.split(","))
    cfg = SweepConfig("tree_tstar", depths=parse_range(args.depths), straddles=straddles,
                      threshold=args.threshold, jobs=args.jobs)
    result = run_sweep(cfg)
    write_sweep_csv(result.rows, args.out)
    print(f"{'k':>2} {'s':>5} {'|V|':>5} {'T*':>9} {'10 sqrt k':>9}  status")
    for r in result.rows:
        print(f"{r.param:>2} {r.straddle:>5g} {r.n_vertices:>5} {r.value:>9.3f} {r.ref_curve:>9.3f}  {r.status}")

    if args.plot:
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 4))
        for s in straddles:
            rows = [r for r in result.rows if r.straddle == s]
            ax.semilogy([r.param for r in rows], [r.value for r in rows], "o-", label=f"s = {s:g}")
        ks = sorted({r.param for r in result.rows})
        ax.semilogy(ks, [10 * k ** 0.5 for k in ks], "k--", label="10 sqrt(k)")
        ax.set_xlabel("depth k")
        ax.set_ylabel("T*")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)


if __name__ == "__main__":
    main()
