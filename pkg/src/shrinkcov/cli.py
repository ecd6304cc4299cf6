"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import contextlib
import csv
import json
import sys

import numpy as np

from ._errors import DataError, NumericalError
from .dataio import (
    LAYOUTS, format_float, load_matrix, orient, read_labels, read_table, write_matrix,
)
from .genes import REPORT_FIELDS, GeneTable, genes_report, qq_data
from .models import parse_model, true_lambda
from .shrinkage import (
    TargetKind,
    advise_target,
    estimate,
    intensity,
    nu_hat,
)
from .simulation import ESTIMATORS, SimConfig, sweep, write_csv, write_dump
from .traces import traces_fast, traces_naive

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _delimiter(text):
    return None if text in ("ws", "whitespace") else text.encode().decode("unicode_escape")


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _add_input(sp):
    sp.add_argument("--input", required=True, help="delimited numeric table")
    sp.add_argument("--layout", choices=LAYOUTS, default="observations",
                    help="whether file rows are observations or variables")
    sp.add_argument("--delimiter", type=_delimiter, default=",",
                    help="field separator; 'ws' splits on whitespace (default ',')")
    sp.add_argument("--header", action="store_true", help="skip a header row")


def _load(args):
    return load_matrix(args.input, layout=args.layout, delimiter=args.delimiter,
                       has_header=args.header)


def cmd_estimate(args):
    x = _load(args)
    centered = not args.uncentered
    stats = traces_fast(x, centered=centered)
    nu = nu_hat(stats)
    variances = np.square(x).mean(axis=0) if centered else x.var(axis=0, ddof=1)
    var_range = float(variances.max() - variances.min())

    lams = {}
    for t in TargetKind:
        try:
            lams[t] = intensity(t, stats.t1, stats.t2, stats.t3, stats.n_vars, stats.df)
        except NumericalError:
            lams[t] = None
    advice = None
    if all(v is not None for v in lams.values()):
        kind, why = advise_target(lams[TargetKind.SPHERICAL], lams[TargetKind.IDENTITY],
                                  lams[TargetKind.DIAGONAL], nu, var_range,
                                  gap=args.gap, nu_tol=args.nu_tol,
                                  range_threshold=args.range_threshold)
        advice = {"target": kind.value, "rationale": why,
                  "lambdas": {k.value: v for k, v in lams.items()}}

    if args.target == "auto":
        if advice is None:
            raise NumericalError("cannot choose a target automatically: an intensity is degenerate")
        target = TargetKind(advice["target"])
    else:
        target = TargetKind(args.target)
    est = estimate(x, target, centered=centered, stats=stats)

    if args.out_matrix:
        with _open_out(args.out_matrix) as fh:
            write_matrix(est.shrunk, fh)
    summary = {
        "n": stats.n_obs,
        "p": stats.n_vars,
        "df": stats.df,
        "centered": centered,
        "target": target.value,
        "lambda_hat": est.lambda_hat,
        "nu_hat": nu,
        "y1": stats.t1,
        "y2": stats.t2,
        "y3": stats.t3,
        "variance_range": var_range,
        "advice": advice,
    }
    with _open_out(args.out_summary) as fh:
        fh.write(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def cmd_traces(args):
    x = _load(args)
    fn = traces_naive if args.naive else traces_fast
    print(json.dumps(fn(x, centered=not args.uncentered).as_dict(), indent=2))
    return EXIT_OK


def cmd_simulate(args):
    configs = []
    for p in args.p:
        model = parse_model(args.cov, p, seed=args.seed)
        for n in args.n:
            configs.append(SimConfig(
                scenario=args.scenario, model=model, n_obs=n, reps=args.reps, seed=args.seed,
                centered=not args.uncentered, evaluate_inverse=args.inverse,
                estimators=tuple(args.estimators.split(",")),
            ))
    reports = sweep(configs, workers=args.threads)
    with _open_out(args.out) as fh:
        write_csv(reports, fh)
    if args.dump:
        with _open_out(args.dump) as fh:
            write_dump(reports, fh)
    return EXIT_OK


def cmd_true_lambda(args):
    targets = list(TargetKind) if args.target == "all" else [TargetKind(args.target)]
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "N", "p", "df", "target", "lambda"])
        for p in args.p:
            model = parse_model(args.cov, p, seed=args.seed)
            for n in args.n:
                df = n - 1 if args.uncentered else n
                for t in targets:
                    lam = true_lambda(model, n, centered=not args.uncentered, target=t)
                    w.writerow([model.label(), n, p, df, t.value, format_float(lam)])
    return EXIT_OK


def cmd_genes(args):
    values, header = read_table(args.input, delimiter=args.delimiter, has_header=args.header)
    x = orient(values, args.layout)
    gene_ids = None
    if args.gene_ids:
        with open(args.gene_ids, encoding="utf-8") as fh:
            gene_ids = [line.strip() for line in fh if line.strip()]
    elif header is not None and args.layout == "observations":
        gene_ids = header
    table = GeneTable(x, gene_ids, read_labels(args.labels))
    rows, ranking = genes_report(table, args.top, log10=args.log10, centered=args.centered)
    if ranking.infinite.size:
        ids = ", ".join(table.gene_ids[i] for i in ranking.infinite)
        print(f"warning: infinite BW score (zero within-group variance) for genes: {ids}",
              file=sys.stderr)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for row in rows:
            w.writerow([format_float(row[k]) if isinstance(row[k], float) else row[k]
                        for k in REPORT_FIELDS])
    if args.qq:
        qtable = table.log10() if args.log10 else table
        pairs = qq_data(qtable, ranking.order[:args.qq])
        with _open_out(args.qq_out) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gene", "group", "rank", "theoretical", "sample"])
            for r in pairs:
                w.writerow([r["gene"], r["group"], r["rank"], format_float(r["theoretical"]),
                            format_float(r["sample"])])
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="shrinkcov",
                     description="Nonparametric Stein-type shrinkage covariance estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("estimate", help="shrink the sample covariance of a data file")
    _add_input(sp)
    sp.add_argument("--target", choices=["auto"] + [t.value for t in TargetKind],
                    default="auto")
    sp.add_argument("--uncentered", action="store_true",
                    help="estimate the mean (df = N - 1) instead of assuming zero mean")
    sp.add_argument("--out-matrix", help="CSV file for the shrunk matrix")
    sp.add_argument("--out-summary", help="JSON summary file (printed if omitted)")
    sp.add_argument("--gap", type=float, default=0.05,
                    help="intensity spread above which the largest one wins")
    sp.add_argument("--nu-tol", type=float, default=0.1,
                    help="|nu_hat - 1| tolerance for preferring the identity target")
    sp.add_argument("--range-threshold", type=float, default=1.0,
                    help="variance range above which the diagonal target is preferred")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("traces", help="print the trace statistics as JSON")
    _add_input(sp)
    sp.add_argument("--uncentered", action="store_true")
    sp.add_argument("--naive", action="store_true", help="use the O(N^4) reference sums")
    sp.set_defaults(func=cmd_traces)

    sp = sub.add_parser("simulate", help="Monte Carlo SPRIAL sweep")
    sp.add_argument("--scenario", required=True, help="normal, gamma or mixture")
    sp.add_argument("--cov", required=True, help="covariance model, e.g. ar1:0.5")
    sp.add_argument("--n", type=_int_list, required=True, help="sample sizes, e.g. 10,50")
    sp.add_argument("--p", type=_int_list, required=True, help="dimensions, e.g. 100,1000")
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--inverse", action="store_true", help="compare inverses instead")
    sp.add_argument("--estimators", default="spherical,lw",
                    help=f"comma list from {','.join(ESTIMATORS)}")
    sp.add_argument("--uncentered", action="store_true")
    sp.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: $SHRINKCOV_THREADS or 1)")
    sp.add_argument("--out", required=True, help="summary CSV ('-' for stdout)")
    sp.add_argument("--dump", help="optional per-replicate CSV")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("true-lambda", help="population intensities from exact traces")
    sp.add_argument("--cov", required=True)
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--p", type=_int_list, required=True)
    sp.add_argument("--target", choices=["all"] + [t.value for t in TargetKind],
                    default="spherical")
    sp.add_argument("--uncentered", action="store_true")
    sp.add_argument("--seed", type=int, default=0, help="seed for sampled-eigenvalue models")
    sp.add_argument("--out", default="-")
    sp.set_defaults(func=cmd_true_lambda)

    sp = sub.add_parser("genes", help="per-group intensity table for expression data")
    _add_input(sp)
    sp.add_argument("--labels", required=True, help="group label per observation")
    sp.add_argument("--gene-ids", help="file with one gene id per line")
    sp.add_argument("--log10", action="store_true")
    sp.add_argument("--centered", action="store_true", help="assume zero-mean data")
    sp.add_argument("--top", type=_int_list, required=True, help="gene-set sizes")
    sp.add_argument("--out", default="-")
    sp.add_argument("--qq", type=int, default=0, help="emit QQ data for the top K genes")
    sp.add_argument("--qq-out", default="-")
    sp.set_defaults(func=cmd_genes)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"shrinkcov: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"shrinkcov: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"shrinkcov: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
