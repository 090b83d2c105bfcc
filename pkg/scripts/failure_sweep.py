"""Failure-case statistics for GridMask, Hide-and-Seek and multi-region Cutout.

Writes a CSV and, when matplotlib is installed, a plot of p_fail against x.

    python scripts/failure_sweep.py --trials 100000 --jobs 8 --out failure.csv
"""
import argparse
import time

from gridmask.failure_sim import METHODS, SimScenario, sweep
from gridmask.io import StatsRow, write_stats_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--xs", default="20,40,60,80,100,112")
    ap.add_argument("--seed", type=int, default=2020)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--gridmask-size", choices=("unit", "drop"), default="unit")
    ap.add_argument("--out", default="failure.csv")
    ap.add_argument("--plot", default=None, help="optional PNG path for the curves")
    args = ap.parse_args()

    xs = [int(v) for v in args.xs.split(",")]
    scenario = SimScenario(trials=args.trials, gridmask_size=args.gridmask_size)
    t0 = time.perf_counter()
    rows = sweep(args.seed, scenario, METHODS, xs, jobs=args.jobs,
                 progress=lambda r: print(f"{r.method:>12} x={r.x:<4d} p_fail={r.p_fail:.4f}"))
    print(f"{len(rows)} points in {time.perf_counter() - t0:.1f}s")
    write_stats_csv([StatsRow.from_stats(r, args.seed) for r in rows], args.out)

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        for m in METHODS:
            pts = [r for r in rows if r.method == m]
            ax.plot([r.x for r in pts], [r.p_fail for r in pts], marker="o", label=m)
        ax.set_xlabel("x (removal size drawn from [x, 2x])")
        ax.set_ylabel("failure probability")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)


if __name__ == "__main__":
    main()
