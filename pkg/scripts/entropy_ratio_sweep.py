"""Ratio N_pi / (entropy-bound right-hand side) over all pi = (id, p), p in S_n.

Reports, per palette size, the max ratio and the permutation attaining it.
"""

import argparse

from rainbowstack.collision import build_collision_graph, count_proper_colorings, entropy_bound_rhs
from rainbowstack.perms import Perm, cycle_stats, weight_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--r", type=int, nargs="+", default=[3, 4, 5])
    args = ap.parse_args()

    ident = Perm.identity(args.n)
    for r in args.r:
        best = (0.0, None)
        for p in Perm.all(args.n):
            pi = (ident, p)
            ratio = float(count_proper_colorings(build_collision_graph(pi), r) / entropy_bound_rhs(pi, r))
            if ratio > best[0]:
                best = (ratio, p)
        ratio, p = best
        print(f"n={args.n} r={r}: max ratio {ratio:.6f} at p={p} "
              f"(f, t)={cycle_stats(p)} wt={weight_report((ident, p)).total_wt}")


if __name__ == "__main__":
    main()
