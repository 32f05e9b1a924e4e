"""Command-line entry point: ``rainbow-stack <subcommand> [flags]``.

Exit codes: 0 success / verified, 1 informational negative (no stacking,
counterexample, failed check), 2 input error, 3 guard exceeded,
4 inconclusive (search budget exhausted).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict
from fractions import Fraction

import mpmath

from . import collision, experiments, lemmas, stacking, verify
from .errors import CapabilityError, InputError
from .perms import Perm, weight_report

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_GUARD, EXIT_INCONCLUSIVE = range(5)


def _count(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v != int(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, mpmath.mpf):
        return float(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "value") and isinstance(x.value, str):
        return x.value
    return x


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(_jsonable(payload), sort_keys=True))
    else:
        print(text)


def _budget(args) -> stacking.SearchBudget:
    return stacking.SearchBudget(getattr(args, "max_nodes", None),
                                 getattr(args, "max_millis", None))


def cmd_find(args) -> int:
    inst = stacking.read_instance(args.instance)
    out = stacking.find_rainbow_stacking(inst, _budget(args), fail_first=args.fail_first)
    wit = [str(p) for p in out.witness] if out.witness else None
    lines = [f"status: {out.status.value}", f"nodes_expanded: {out.nodes_expanded}"]
    if wit:
        lines += [f"sigma_{k + 1}: {w}" for k, w in enumerate(wit)]
    _emit(args, {"status": out.status, "nodes_expanded": out.nodes_expanded,
                 "witness": wit}, "\n".join(lines))
    return {stacking.SearchStatus.FOUND: EXIT_OK,
            stacking.SearchStatus.EXHAUSTED: EXIT_NEGATIVE,
            stacking.SearchStatus.BUDGET: EXIT_INCONCLUSIVE}[out.status]


def cmd_count(args) -> int:
    inst = stacking.read_instance(args.instance)
    Z, reduced = stacking.count_rainbow_stackings(inst, override=args.override_guards)
    _emit(args, {"Z": Z, "reduced": reduced}, f"Z: {Z}\nreduced: {reduced}")
    return EXIT_OK if Z else EXIT_NEGATIVE


def cmd_moments(args) -> int:
    E, EZ = stacking.first_moment(args.n, args.m, args.r)
    bound = stacking.first_moment_upper_bound(args.n, args.m, args.r)
    payload = {"E_nmr": E, "expected_Z": EZ, "upper_bound": bound}
    lines = [f"E_nmr: {mpmath.nstr(E, 15)}", f"expected_Z: {mpmath.nstr(EZ, 15)}",
             f"upper_bound: {mpmath.nstr(bound, 15)}"]
    if args.exact:
        Eq, EZq = stacking.first_moment_exact(args.n, args.m, args.r)
        payload.update(E_nmr_exact=Eq, expected_Z_exact=EZq)
        lines += [f"E_nmr_exact: {Eq}", f"expected_Z_exact: {EZq}"]
        if args.m <= 2 and args.n <= collision.SECOND_MOMENT_GUARD:
            Z2 = collision.second_moment_exact(args.n, args.m, args.r)
            payload["second_moment_exact"] = Z2
            lines.append(f"second_moment_exact: {Z2}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_thresholds(args) -> int:
    r_star, lo, hi = stacking.threshold_formulas(args.n, args.m, args.omega)
    _emit(args, {"r_star": r_star, "r_lower": lo, "r_upper": hi},
          f"r_star: {r_star:.6f}\nr_lower: {lo:.6f}\nr_upper: {hi:.6f}")
    return EXIT_OK


def _perms_arg(args) -> tuple[Perm, ...]:
    if args.perms:
        perms = tuple(Perm.parse(tok) for tok in args.perms.split(";"))
    else:
        if args.n is None or args.m is None:
            raise InputError("gpi needs --perms, or --n and --m (random tuple from --seed)")
        rng = random.Random(args.seed if args.seed is not None else 0)
        perms = tuple(Perm(tuple(rng.sample(range(args.n), args.n))) for _ in range(args.m))
    return perms


def cmd_gpi(args) -> int:
    perms = _perms_arg(args)
    G = collision.build_collision_graph(perms)
    wr = weight_report(perms)
    payload = {"perms": [str(p) for p in perms], "vertices": G.num_vertices,
               "edges": G.num_edges, "wt": wr.total_wt, "tree_bound": wr.tree_bound,
               "tree": [[s.k, s.k2] for s in wr.p]}
    lines = [f"perms: {'; '.join(payload['perms'])}",
             f"vertices: {G.num_vertices}", f"edges: {G.num_edges}",
             f"wt: {wr.total_wt}", f"tree_bound: {wr.tree_bound}"]
    if args.r is not None:
        N = collision.count_proper_colorings(G, args.r, override=args.override_guards)
        corr = collision.pair_correlation_exact(perms, args.r, override=args.override_guards)
        payload.update(N_pi=N, pair_correlation=corr)
        lines += [f"N_pi: {N}", f"pair_correlation: {corr} ~ {float(corr):.6g}"]
        if args.r > (2 * len(perms) - 1) / 3:
            rhs = collision.entropy_bound_rhs(perms, args.r)
            payload.update(entropy_rhs=rhs, entropy_ratio=N / rhs)
            lines += [f"entropy_rhs: {mpmath.nstr(rhs, 12)}",
                      f"entropy_ratio: {mpmath.nstr(N / rhs, 12)}"]
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(collision.format_adjlist(G))
        lines.append(f"adjacency list written to {args.out}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _r_values(args) -> list[int]:
    if args.r_list:
        return [int(x) for x in args.r_list.split(",")]
    if args.r_min is None or args.r_max is None:
        raise InputError("sweep needs --r LIST or --r-min and --r-max")
    return list(range(args.r_min, args.r_max + 1, args.r_step))


def cmd_sweep(args) -> int:
    cfg = experiments.ExperimentConfig(
        args.n, args.m, tuple(_r_values(args)), args.trials, args.seed,
        _budget(args), args.omega)
    table = experiments.run_sweep(cfg, workers=args.threads)
    written = []
    if args.out:
        written = [str(p) for p in experiments.emit_outputs(table, args.format, args.out)]
    if args.json:
        print(experiments.table_to_json(table), end="")
    else:
        print(experiments.table_to_csv(table), end="")
        for p in written:
            print(f"# wrote {p}")
    return EXIT_OK


def cmd_exact_prob(args) -> int:
    p = experiments.exact_existence_probability(args.n, args.m, args.r,
                                                override=args.override_guards)
    _emit(args, {"probability": p, "float": float(p)}, f"probability: {p} ~ {float(p):.6f}")
    return EXIT_OK


def cmd_verify_cayley(args) -> int:
    rep = verify.verify_cayley_no_stacking(args.k, _budget(args), override=args.override_guards)
    text = (f"k={rep.k} n={rep.n}: {rep.verdict.value}; nodes_expanded={rep.nodes_expanded}"
            + (f"; bijections_checked={rep.bijections_checked}"
               if rep.bijections_checked is not None else ""))
    _emit(args, asdict(rep), text)
    return {verify.Verdict.NO_STACKING: EXIT_NEGATIVE,
            verify.Verdict.STACKING_FOUND: EXIT_OK,
            verify.Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}[rep.verdict]


def cmd_verify_odd(args) -> int:
    rep = verify.verify_odd_question(args.n, override=args.override_guards,
                                     certificate_dir=args.out)
    payload = asdict(rep)
    payload.pop("per_pair")
    text = (f"n={rep.n}: {rep.verdict.value}; partitions={rep.partitions} "
            f"iso_classes={rep.iso_classes} pairs_checked={rep.pairs_checked} "
            f"search_nodes={rep.search_nodes}")
    if rep.certificate_path:
        text += f"\ncertificate: {rep.certificate_path}"
    _emit(args, payload, text)
    return EXIT_OK if rep.verdict is verify.Verdict.ALL_ADMIT else EXIT_NEGATIVE


def cmd_lemma_checks(args) -> int:
    g = lemmas.gamma_lemma_check(args.k_max)
    qs = [float(x) for x in args.q.split(",")]
    phis = [lemmas.phi_concavity_check(q, args.f_max) for q in qs]
    lines = [f"gamma_lemma K<={g.K_max}: {'pass' if g.passed else 'FAIL'} "
             f"(pairs={g.pairs_checked}, min log slack={g.min_log_slack:.3g} at {g.argmin})"]
    for p in phis:
        extra = "" if p.concave else f", first convex point f={p.first_convex_point}"
        lines.append(f"phi q={p.q:g} f<={p.f_max}: {'pass' if p.passed else 'FAIL'} "
                     f"(concave={p.concave}, endpoint_max={p.endpoint_max}, "
                     f"max 2nd diff={p.max_second_difference:.3g}{extra})")
    payload = {"gamma": {k: v for k, v in asdict(g).items() if k != "failures"},
               "phi": [dict(asdict(p), passed=p.passed) for p in phis]}
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if g.passed and all(p.passed for p in phis) else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rainbow-stack", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    def budget(p):
        p.add_argument("--max-nodes", type=_count, default=None)
        p.add_argument("--max-millis", type=_count, default=None)

    p = add("find", cmd_find, "search for a rainbow stacking of an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--fail-first", action="store_true",
                   help="smallest-domain-first variable order")
    budget(p)

    p = add("count", cmd_count, "count all rainbow stackings of an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--override-guards", action="store_true")

    p = add("moments", cmd_moments, "first-moment quantities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="also print exact rationals")

    p = add("thresholds", cmd_thresholds, "threshold formulas")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--omega", type=float, default=0.0)

    p = add("gpi", cmd_gpi, "collision graph of a permutation tuple")
    p.add_argument("--perms", help="';'-separated one-line permutations, e.g. '0,1,2;1,2,0'")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--out", help="write the adjacency list here")
    p.add_argument("--override-guards", action="store_true")

    p = add("sweep", cmd_sweep, "Monte Carlo existence sweep over r")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", dest="r_list", help="comma-separated palette sizes")
    p.add_argument("--r-min", type=int)
    p.add_argument("--r-max", type=int)
    p.add_argument("--r-step", type=int, default=1)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="output path (suffix replaced per format)")
    p.add_argument("--format", choices=["csv", "json", "plot", "all"], default="all")
    budget(p)

    p = add("exact-prob", cmd_exact_prob, "exact existence probability by enumeration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--override-guards", action="store_true")

    p = add("verify-cayley", cmd_verify_cayley, "XOR sum-coloring pair has no stacking")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--override-guards", action="store_true")
    budget(p)

    p = add("verify-odd", cmd_verify_odd, "every pair of proper colorings of K_n (n odd)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--override-guards", action="store_true")
    p.add_argument("--out", help="directory for counterexample certificates")

    p = add("lemma-checks", cmd_lemma_checks, "numerical lemma checks")
    p.add_argument("--k-max", type=int, default=200)
    p.add_argument("--f-max", type=int, default=10 ** 4)
    p.add_argument("--q", default="0,0.01,0.1,1")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapabilityError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
