"""Exhaustive check that every pair of proper colorings of K_n (n odd) stacks.

    python scripts/verify_odd.py 5
    python scripts/verify_odd.py 7 --override --certificates certs/   # slow
"""

import argparse
import time

from rainbowstack.verify import verify_odd_question


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("n", type=int)
    ap.add_argument("--override", action="store_true")
    ap.add_argument("--certificates", default=None)
    args = ap.parse_args()

    t0 = time.perf_counter()
    rep = verify_odd_question(args.n, override=args.override, certificate_dir=args.certificates)
    print(f"n={rep.n}: {rep.verdict.value}")
    print(f"  matching partitions: {rep.partitions}, isomorphism classes: {rep.iso_classes}")
    print(f"  class pairs checked: {rep.pairs_checked}, search nodes: {rep.search_nodes}")
    heavy = sorted(rep.per_pair, key=lambda d: -d["nodes"])[:3]
    print(f"  hardest pairs (class counts, nodes): {[(d['P1'], d['P2'], d['nodes']) for d in heavy]}")
    if rep.counterexample:
        print(f"  counterexample: {rep.counterexample}")
        print(f"  certificate: {rep.certificate_path}")
    print(f"  {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
