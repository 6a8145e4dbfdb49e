"""Command-line front end.

Every subcommand is a thin adapter over the library: it parses flags, calls
the corresponding operations, writes an optional report file and prints a
one-line summary.  Exit codes: 0 success, 1 structured experiment failure
(for example an infeasible partition), 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from twinlab import __version__, alternating, perms, words
from twinlab.harness import ExperimentReport


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", type=str, default=None, help="report file path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=None)


def _emit(report: ExperimentReport, args) -> None:
    if args.out:
        report.write(args.out, args.format)


# -- words ----------------------------------------------------------------------

def _words_scan(args) -> int:
    if args.random:
        n, k = args.random
        word_list = [words.random_word(n, k, args.seed)]
    elif args.infile:
        word_list = words.read_words(args.infile)
    else:
        print("words scan needs --random N K or --in FILE", file=sys.stderr)
        return 2
    for w in word_list:
        m, start = words.max_rpower_witness(w, args.r)
        where = "none" if start is None else f"start={start + 1}"
        print(f"n={len(w)} k={w.alphabet_size} r={args.r} M={m} witness: m={m} {where}")
    return 0


def _words_tails(args) -> int:
    center = words.theory_center_M(args.n, args.k, args.r)
    offsets = [float(t) for t in args.t.split(",")]
    thresholds = [center + t for t in offsets]
    summary = words.mc_experiment_M(args.n, args.k, args.r, args.trials, args.seed,
                                    thresholds=thresholds, threads=args.threads)
    report = ExperimentReport(
        params={"n": args.n, "k": args.k, "r": args.r, "trials": args.trials,
                "statistic": "max_rpower_length"},
        seed=args.seed,
    )
    report.summaries["M"] = summary
    report.theory["center"] = center
    for t in offsets:
        bound = words.theory_tail_M(args.n, args.k, args.r, t, "upper")
        report.theory[f"upper_tail_t{t:g}"] = bound
        frac = summary.tail[center + t]
        slack = 3.0 * (frac * (1 - frac) / args.trials) ** 0.5
        report.add_verdict(f"tail_t{t:g}", frac <= bound + slack,
                           bound + slack - frac)
    report.add_verdict("mean_window", abs(summary.mean - center) <= words.MEAN_WINDOW,
                       words.MEAN_WINDOW - abs(summary.mean - center))
    _emit(report, args)
    ok = all(v["pass"] for v in report.verdicts.values())
    print(f"M: mean={summary.mean:.3f} center={center:.3f} "
          f"verdicts={'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


def _words_rstat(args) -> int:
    center = words.theory_center_R(args.n, args.k, args.m)
    summary = words.mc_experiment_R(args.n, args.k, args.m, args.trials, args.seed,
                                    thresholds=[center], threads=args.threads)
    report = ExperimentReport(
        params={"n": args.n, "k": args.k, "m": args.m, "trials": args.trials,
                "statistic": "max_power_of_length"},
        seed=args.seed,
    )
    report.summaries["R"] = summary
    report.theory["center"] = center
    report.theory["upper_tail_u1"] = words.theory_tail_R(args.n, args.k, args.m, 1.0,
                                                         "upper")
    _emit(report, args)
    print(f"R: mean={summary.mean:.3f} center={center:.3f} "
          f"mean-center={summary.mean - center:+.3f}")
    return 0


# -- perms ----------------------------------------------------------------------

def _perm_params(args) -> perms.PartitionParams:
    return perms.PartitionParams(c_t=args.c_t, c_w=args.c_w)


def _perms_partition(args) -> int:
    ps = perms.random_pointset(args.n, args.seed)
    geometry = perms.plan_geometry(args.n, args.k, _perm_params(args))
    try:
        part = perms.ascending_partition(ps, args.k, geometry)
    except perms.PartitionInfeasible as exc:
        print(f"no partition: {exc.stage}: {exc.detail}")
        if args.emit_svg:
            perms.write_partition_svg(args.emit_svg, ps, geometry)
        return 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(perms.partition_to_json(part))
    if args.emit_svg:
        perms.write_partition_svg(args.emit_svg, ps, geometry, part)
    print(f"partition: n={args.n} k={args.k} classes={len(part)} "
          f"verified={perms.verify_partition(ps, part, args.k)}")
    return 0


def _perms_prob(args) -> int:
    r_values = [int(r) for r in args.r_values.split(",")]
    table = perms.mc_partition_success(args.k, r_values, args.trials, args.seed,
                                       _perm_params(args), threads=args.threads)
    report = ExperimentReport(
        params={"k": args.k, "r_values": r_values, "trials": args.trials,
                "c_t": args.c_t, "c_w": args.c_w},
        seed=args.seed,
    )
    report.summaries["success"] = {str(r): table[r] for r in r_values}
    _emit(report, args)
    line = " ".join(f"r={r}:{table[r]['rate']:.3f}" for r in r_values)
    print(f"partition success k={args.k}: {line}")
    return 0


def _perms_oracle(args) -> int:
    if args.perm:
        perm = [int(v) for v in args.perm.split(",")]
    else:
        perm = perms.random_permutation(args.n, args.seed).tolist()
    ok = perms.exists_partition_bruteforce(perm, args.k, not args.similar)
    kind = "similar" if args.similar else "increasing"
    print(f"perm={perm} k={args.k} {kind}-partition={'yes' if ok else 'no'}")
    return 0


# -- alternating -------------------------------------------------------------------

def _alt_counts(args) -> int:
    table = alternating.count_good_dp(args.max_k, args.convention)
    if args.out:
        table.write_csv(args.out)
    totals = {k: table.total(k) for k in range(3, args.max_k + 1)}
    print(f"good patterns ({args.convention}): " +
          " ".join(f"k={k}:{v}" for k, v in totals.items()))
    return 0


def _alt_constant(args) -> int:
    if args.convention == "auto":
        # the floor that arbitrates the conventions is published at truncation 13
        convention = alternating.arbitrate_convention()
    else:
        convention = args.convention
    gain = alternating.second_round_gain(args.max_k, convention)
    bound = Fraction(1, 3) + gain
    report = ExperimentReport(
        params={"max_k": args.max_k, "convention": convention},
        seed=None,
    )
    report.theory["pair_sum"] = str(alternating.second_round_probability(args.max_k,
                                                                         convention))
    report.theory["gain"] = str(gain)
    report.theory["gain_decimal"] = f"{float(gain):.12f}"
    report.theory["lower_bound"] = str(bound)
    report.theory["lower_bound_decimal"] = f"{float(bound):.12f}"
    _emit(report, args)
    print(f"convention={convention} gain={gain} ~ {float(gain):.12f} "
          f"lower_bound={bound} ~ {float(bound):.12f}")
    return 0


def _alt_simulate(args) -> int:
    summary = alternating.mc_two_round(args.n, args.trials, args.seed,
                                       threads=args.threads)
    report = ExperimentReport(
        params={"n": args.n, "trials": args.trials, "statistic": "min_twin_length"},
        seed=args.seed,
    )
    report.summaries["min_len"] = summary
    report.theory["normalized_mean"] = summary.mean / args.n
    _emit(report, args)
    print(f"two-round: mean min(|A|,|B|)/n = {summary.mean / args.n:.5f} "
          f"sd={summary.sd:.2f}")
    return 0


def _alt_slope(args) -> int:
    res = alternating.mc_sloped_same_side(args.n, args.trials, args.seed,
                                          threads=args.threads)
    report = ExperimentReport(
        params={"n": args.n, "trials": args.trials,
                "statistic": "sloped_same_side"},
        seed=args.seed,
    )
    report.summaries["per_trial"] = res.per_trial
    report.summaries["pooled"] = {"same": res.same, "eligible": res.eligible,
                                  "estimate": res.estimate}
    _emit(report, args)
    print(f"same-side nearest sloped: {res.estimate:.5f} "
          f"(se={res.standard_error:.5f}, eligible={res.eligible})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twinlab")
    ap.add_argument("--version", action="version", version=f"twinlab {__version__}")
    sub = ap.add_subparsers(dest="group", required=True)

    wp = sub.add_parser("words", help="repetition statistics of random words")
    wsub = wp.add_subparsers(dest="cmd", required=True)
    p = wsub.add_parser("scan", help="maximum repetition length of one word")
    p.add_argument("--random", nargs=2, type=int, metavar=("N", "K"))
    p.add_argument("--in", dest="infile", type=str)
    p.add_argument("--r", type=int, default=2)
    _add_common(p)
    p.set_defaults(fn=_words_scan)
    p = wsub.add_parser("tails", help="tail-bound experiment for the block length")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--t", type=str, default="1,2,3", help="tail offsets")
    _add_common(p)
    p.set_defaults(fn=_words_tails)
    p = wsub.add_parser("rstat", help="maximum multiplicity at fixed block length")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=3)
    _add_common(p)
    p.set_defaults(fn=_words_rstat)

    pp = sub.add_parser("perms", help="ascending partitions of random point sets")
    psub = pp.add_subparsers(dest="cmd", required=True)
    p = psub.add_parser("partition", help="one seeded partition attempt")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c-t", type=float, default=1.0)
    p.add_argument("--c-w", type=float, default=1.0)
    p.add_argument("--emit-svg", type=str, default=None)
    _add_common(p)
    p.set_defaults(fn=_perms_partition)
    p = psub.add_parser("prob", help="success-rate sweep over multiplicities")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r-values", type=str, default="50,100,500")
    p.add_argument("--c-t", type=float, default=1.0)
    p.add_argument("--c-w", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(fn=_perms_prob)
    p = psub.add_parser("oracle", help="brute-force partition existence")
    p.add_argument("--perm", type=str, default=None, help="comma-separated values")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--similar", action="store_true",
                   help="require mutual similarity instead of increasing")
    _add_common(p)
    p.set_defaults(fn=_perms_oracle)

    app = sub.add_parser("alt", help="alternating subsequences and twin constants")
    asub = app.add_subparsers(dest="cmd", required=True)
    p = asub.add_parser("counts", help="good-pattern count table")
    p.add_argument("--max-k", type=int, default=13)
    p.add_argument("--convention", choices=alternating.CONVENTIONS, default="text")
    _add_common(p)
    p.set_defaults(fn=_alt_counts)
    p = asub.add_parser("constant", help="exact truncated twin constant")
    p.add_argument("--max-k", type=int, default=13)
    p.add_argument("--convention",
                   choices=alternating.CONVENTIONS + ("auto",), default="auto")
    _add_common(p)
    p.set_defaults(fn=_alt_constant)
    p = asub.add_parser("simulate", help="two-round extrema procedure")
    p.add_argument("--n", type=int, default=100000)
    _add_common(p)
    p.set_defaults(fn=_alt_simulate)
    p = asub.add_parser("slope", help="same-side nearest sloped neighbours")
    p.add_argument("--n", type=int, default=1000000)
    _add_common(p)
    p.set_defaults(fn=_alt_slope)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except perms.PartitionInfeasible as exc:
        print(f"no partition: {exc.stage}: {exc.detail}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
