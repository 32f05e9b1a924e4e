"""Existence-probability curves p_hat(r) around the threshold for several n.

    python scripts/run_threshold_sweep.py --n 8 10 12 --m 2 --trials 300 --seed 1 --out results/
"""

import argparse
import time
from pathlib import Path

from rainbowstack.experiments import ExperimentConfig, emit_outputs, run_sweep
from rainbowstack.stacking import SearchBudget, threshold_formulas


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[8, 10, 12])
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--max-millis", type=int, default=None)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    for n in args.n:
        r_star, _, r_upper = threshold_formulas(n, args.m)
        # a couple of palette sizes on each side of the bracket
        rs = tuple(range(max(args.m, int(r_star) - 1), int(r_upper) + 3))
        cfg = ExperimentConfig(n, args.m, rs, args.trials, args.seed,
                               SearchBudget(max_millis=args.max_millis))
        t0 = time.perf_counter()
        table = run_sweep(cfg, workers=args.workers)
        dt = time.perf_counter() - t0
        print(f"n={n} m={args.m} r_star={r_star:.3f} r_upper={r_upper:.3f} ({dt:.1f}s)")
        for row in table.rows:
            p = "  n/a" if row.p_hat is None else f"{row.p_hat:.3f}"
            print(f"  r={row.r:3d}  p_hat={p}  ci=[{row.ci_lo}, {row.ci_hi}]  timeouts={row.timeout}")
        emit_outputs(table, "all", Path(args.out) / f"sweep_n{n}_m{args.m}.csv")


if __name__ == "__main__":
    main()
