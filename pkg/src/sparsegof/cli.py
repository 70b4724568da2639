"""Command-line entry point: ``sparsegof <subcommand> [flags]``.

Exit status: 0 success, 2 invalid input, 3 refused by a size/budget guard,
1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, cumulants, decomposable, montecarlo, oracle, poisson_moments, tail
from .errors import GuardError, RangeError
from .fileio import ProbabilityVector, jsonable, read_counts, read_probs, read_vector


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _constants(text: str) -> dict:
    vals = _floats(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("expected four values C1,C2,C3,C4")
    return dict(zip(("C1", "C2", "C3", "C4"), vals))


def _stat(parser, required=True):
    parser.add_argument("--stat", choices=["chi2", "lr"], required=required, default=None if required else "chi2",
                        help="statistic: Pearson chi-square or log-likelihood ratio")


def _output(parser, formats=("json", "csv")):
    parser.add_argument("--format", choices=formats, default="json", help="output format")
    parser.add_argument("--out", metavar="PATH", default=None, help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="sparsegof", formatter_class=fmt,
                                     description="Large-deviation normal-tail p-values for sparse "
                                                 "multinomial goodness-of-fit statistics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("pvalue", formatter_class=fmt, help="statistic and normal-tail p-value from counts")
    _stat(p)
    p.add_argument("--counts", metavar="PATH", required=True, help="observed counts, one per line")
    p.add_argument("--probs", metavar="PATH", required=True, help="cell probabilities, one per line (a/b allowed)")
    p.add_argument("--n", type=int, default=None, help="sample size (integer); inferred from counts when omitted")
    p.add_argument("--centering", choices=["N", "N-1"], default="N", help="chi-square centre (number of cells or cells - 1)")
    p.add_argument("--constants", type=_constants, default=None, metavar="C1,C2,C3,C4",
                   help="cell-balance constants for the diagnostics (default 1,1,1,1)")
    p.add_argument("--exact-rational", action="store_true", help="parse probabilities as exact rationals")
    _output(p)

    p = sub.add_parser("profile", formatter_class=fmt, help="Poissonized mean/variance characteristics")
    _stat(p)
    p.add_argument("--probs", metavar="PATH", required=True, help="cell probabilities, one per line")
    p.add_argument("--n", type=int, required=True, help="sample size (integer)")
    p.add_argument("--exact-rational", action="store_true", help="parse probabilities as exact rationals")
    _output(p)

    p = sub.add_parser("moments", formatter_class=fmt, help="Poisson central moment and its coefficients")
    p.add_argument("--order", type=int, required=True, help="moment order nu (2..40)")
    p.add_argument("--lambda", dest="lam", type=str, required=True, metavar="REAL",
                   help="Poisson rate (dimensionless expected count); a/b allowed")
    p.add_argument("--exact-rational", action="store_true", help="evaluate exactly in rationals")
    _output(p)

    p = sub.add_parser("cumulants", formatter_class=fmt,
                       help="cumulants from a moment file, or of Poisson / chi-square cells")
    p.add_argument("moments", nargs="?", metavar="MOMENTS",
                   help="raw moments alpha_1..alpha_K (JSON array or one per line)")
    p.add_argument("--stat", choices=["chi2"], default=None,
                   help="with --lambda: cumulants of one chi-square cell (xi - lam)^2 / lam")
    p.add_argument("--lambda", dest="lam", type=str, default=None, metavar="REAL",
                   help="Poisson rate; without MOMENTS, use centred Poisson moments")
    p.add_argument("--order", type=int, default=6, help="highest cumulant order K")
    p.add_argument("--exact-rational", action="store_true", help="exact rational arithmetic")
    _output(p)

    p = sub.add_parser("exact", formatter_class=fmt, help="exact tail by full enumeration (tiny instances)")
    _stat(p)
    p.add_argument("--n", type=int, required=True, help="sample size (integer)")
    p.add_argument("--probs", metavar="PATH", required=True, help="cell probabilities, one per line")
    p.add_argument("--threshold", type=float, default=None, help="report P(statistic >= threshold)")
    p.add_argument("--exact-rational", action="store_true", help="parse probabilities as exact rationals")
    _output(p)

    p = sub.add_parser("simulate", formatter_class=fmt, help="Monte Carlo tail frequencies")
    _stat(p)
    p.add_argument("--probs", metavar="PATH", required=True, help="cell probabilities, one per line")
    p.add_argument("--n", type=int, required=True, help="sample size (integer)")
    p.add_argument("--x", type=_floats, default=[1.0], metavar="CSV-list",
                   help="standardized deviations, ascending, comma separated")
    p.add_argument("--reps", type=int, default=100_000, help="replications (>= 1000)")
    p.add_argument("--seed", type=int, default=0, help="64-bit unsigned seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--centering", choices=["N", "N-1"], default="N", help="chi-square centre")
    _output(p)

    p = sub.add_parser("diagnose", formatter_class=fmt, help="validity caps and condition flags")
    _stat(p)
    p.add_argument("--probs", metavar="PATH", required=True, help="cell probabilities, one per line")
    p.add_argument("--n", type=int, required=True, help="sample size (integer)")
    p.add_argument("--x", type=_floats, default=[0.0], metavar="CSV-list", help="standardized deviations (>= 0)")
    p.add_argument("--constants", type=_constants, default=None, metavar="C1,C2,C3,C4",
                   help="cell-balance constants (default 1,1,1,1)")
    _output(p, formats=("json",))
    return parser


def _rate(text: str, exact: bool):
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise RangeError(f"cannot parse rate {text!r}") from None
    return v if exact or "/" in text else float(v)


def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def cmd_pvalue(args):
    probs = read_probs(args.probs, exact=args.exact_rational)
    counts = read_counts(args.counts)
    if len(counts) != probs.N:
        raise RangeError(f"{len(counts)} counts but {probs.N} probabilities")
    n = int(counts.sum())
    if args.n is not None and args.n != n:
        raise RangeError(f"--n {args.n} disagrees with the counts total {n}")
    t = float(decomposable.statistic(counts, probs, args.stat))
    report = tail.tail_pvalue(t, args.stat, probs, n, args.centering, args.constants)
    result = {"N": probs.N, "n": n, **report.to_dict()}
    if args.stat == "chi2" and probs.exact:
        result["statistic_exact"] = sum(
            (Fraction(int(e)) - n * p) ** 2 / (n * p) for e, p in zip(counts, probs.values))
    rows = [["kind", "N", "n", "statistic", "x", "p_upper", "p_lower"],
            [args.stat, probs.N, n, repr(t), repr(report.x), repr(report.p_upper), repr(report.p_lower)]]
    return result, _csv(rows)


def cmd_profile(args):
    probs = read_probs(args.probs, exact=args.exact_rational)
    if args.stat == "chi2":
        prof = decomposable.chi_square_profile(probs, args.n)
        result = {"closed_form": prof.to_dict()}
    else:
        prof = decomposable.lr_profile_asymptotic(probs, args.n)
        numeric = decomposable.generic_profile(decomposable.lr_cell, probs, args.n)
        result = {"asymptotic": prof.to_dict(), "numeric": numeric.to_dict()}
    rows = [["field", "value"]] + [[k, repr(v)] for k, v in prof.to_dict().items()]
    return result, _csv(rows)


def cmd_moments(args):
    lam = _rate(args.lam, args.exact_rational)
    poly = poisson_moments.moment_coefficients(args.order)
    value = poisson_moments.central_moment(args.order, lam, exact=args.exact_rational)
    result = {
        "order": args.order,
        "lambda": lam,
        "value": value,
        "coefficients": [{"l": l, "c": c, "scaled": s}
                         for l, (c, s) in enumerate(zip(poly.coefficients, poly.scaled), start=1)],
    }
    buf = io.StringIO()
    poisson_moments.write_coefficients_csv(buf, [args.order])
    return result, buf.getvalue()


def cmd_cumulants(args):
    exact = args.exact_rational
    if args.moments:
        moments = read_vector(args.moments, exact=exact)
        source = "file"
    elif args.lam is not None:
        lam = _rate(args.lam, True)
        if args.stat == "chi2":
            c = decomposable.chi_square_cell_cumulants(lam, args.order)
            if not exact:
                c = [float(v) for v in c]
            moments = cumulants.cumulants_to_moments(c, exact=exact)
            source = "chi2-cell"
        else:
            moments = [Fraction(0)] + [poisson_moments.central_moment(k, lam, exact=True)
                                       for k in range(2, args.order + 1)]
            source = "poisson"
        if not exact:
            moments = [float(m) for m in moments]
    else:
        raise RangeError("give a MOMENTS file or --lambda")
    c = cumulants.moments_to_cumulants(moments, exact=exact)
    result = {"source": source, "moments": moments, "cumulants": c}
    if len(c) >= 3 and float(c[1]) > 0:
        scale = float(c[1]) ** 0.5
        standardized = [0.0, 1.0] + [float(ck) / scale ** k for k, ck in enumerate(c[2:], start=3)]
        cert = cumulants.statulevicius_delta(standardized)
        result["standardized"] = standardized
        result["delta"] = cert.delta
    rows = [["k", "cumulant"]] + [[k, str(v)] for k, v in enumerate(c, start=1)]
    return result, _csv(rows)


def cmd_exact(args):
    probs = read_probs(args.probs, exact=args.exact_rational)
    table = oracle.enumerate_multinomial(args.n, probs)
    cell = decomposable.chi_square_cell if args.stat == "chi2" else decomposable.lr_cell
    values = oracle.statistic_values(table, cell)
    scale = 1 if args.stat == "chi2" else 2
    mean = sum((p * Fraction(v) for v, p in zip(values, table.probabilities)), Fraction(0)) \
        if all(isinstance(v, (int, Fraction)) for v in values) \
        else sum(float(p) * v for v, p in zip(values, table.probabilities))
    result = {"N": probs.N, "n": args.n, "outcomes": len(table), "mean": scale * mean}
    if args.threshold is not None:
        result["threshold"] = args.threshold
        result["tail"] = oracle.exact_tail(args.n, probs, args.stat, args.threshold)
    buf = io.StringIO()
    table.write_csv(buf)
    return result, buf.getvalue()


def cmd_simulate(args):
    probs = read_probs(args.probs)
    cfg = montecarlo.SimulationConfig(n=args.n, probs=probs, kind=args.stat, replications=args.reps,
                                      x_grid=args.x, seed=args.seed, partitions=args.threads,
                                      centering=args.centering)
    res = montecarlo.estimate_tail(cfg)
    return res.to_dict(), montecarlo.to_csv([res])


def cmd_diagnose(args):
    probs = read_probs(args.probs)
    out = []
    for x in args.x:
        d = tail.zone_diagnostics(probs, args.n, x, args.stat, args.constants)
        out.append({"x": x, "caps": d.caps, "cap_ratios": d.cap_ratios, "flags": d.flags,
                    "k_tilde": d.k_tilde, "delta": d.delta, "x_max": d.x_max})
    return out, ""


COMMANDS = {
    "pvalue": cmd_pvalue, "profile": cmd_profile, "moments": cmd_moments, "cumulants": cmd_cumulants,
    "exact": cmd_exact, "simulate": cmd_simulate, "diagnose": cmd_diagnose,
}


def dispatch(args: argparse.Namespace) -> str:
    result, csv_text = COMMANDS[args.subcommand](args)
    if args.format == "csv":
        return csv_text
    flags = {k: v for k, v in vars(args).items() if k != "subcommand"}
    envelope = {
        "invocation": {"subcommand": args.subcommand, "flags": flags,
                       "seed": getattr(args, "seed", None), "version": __version__},
        "result": result,
    }
    return json.dumps(jsonable(envelope), indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = dispatch(args)
    except GuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
