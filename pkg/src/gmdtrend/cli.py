"""Command line interface: ``gmdtrend {test,segment,lrv,simulate}``.

Results are JSON documents on stdout or in ``--output``. Exit codes:
0 success, 2 input error, 3 degenerate data, 4 configuration error.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .blocks import local_block_means, local_block_variances, make_block_scheme
from .changepoint import (
    DEFAULT_EXCLUSION,
    DEFAULT_MIN_SEGMENT,
    fit_polynomial_trend,
    piecewise_mean,
    seasonal_difference,
    segment_recursively,
)
from .errors import ConfigError, GMDTrendError
from .io import dumps, load_scenarios, read_series_csv, write_atomic
from .lrv import kappa_hat, kappa_tilde_x, make_subsampling_scheme
from .meantest import TestConfig, run_test
from .series import TimeSeries
from .simulate import lrv_bias_rmse, rejection_rate_table

log = logging.getLogger("gmdtrend")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s", type=float, default=0.7, help="block length exponent, l = floor(n^s)")
    p.add_argument("--q", type=float, default=0.4, help="subsampling exponent, l~ = floor(n^q)")
    p.add_argument("--c0", type=float, default=10.0, help="neighbour radius in subsampling blocks")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--variant", choices=("full", "simplified"), default="full")
    p.add_argument("--psi-reps", type=int, default=7000, help="Monte Carlo draws for psi^2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="write JSON here instead of stdout")


def _data(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="CSV file")
    p.add_argument("--column", help="column name or 0-based index")
    p.add_argument("--label-column", help="column of time labels (e.g. years) echoed for breaks")
    p.add_argument("--diff-lag", type=int, help="analyse x[i+lag] - x[i] instead of x")
    p.add_argument("--detrend-degree", type=int, help="subtract a least-squares polynomial trend first")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmdtrend", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="test the series for a constant mean")
    _data(p)
    _common(p)

    p = sub.add_parser("segment", help="recursive change-point estimation")
    _data(p)
    _common(p)
    p.add_argument("--min-segment", type=int, default=DEFAULT_MIN_SEGMENT)
    p.add_argument("--exclusion", type=float, default=DEFAULT_EXCLUSION,
                   help="fraction of the two-block window excluded at each end")

    p = sub.add_parser("lrv", help="long run standard deviation estimates")
    _data(p)
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo rejection rates or LRV bias/RMSE")
    p.add_argument("--scenario", required=True, help="JSON scenario file")
    p.add_argument("--replications", type=int, help="override the file's replication count")
    _common(p)
    return parser


def _config(args) -> TestConfig:
    return TestConfig(s=args.s, q=args.q, c0=args.c0, alpha=args.alpha,
                      psi_mc_reps=args.psi_reps, seed=args.seed, variant=args.variant)


def _load(args) -> tuple[TimeSeries, dict]:
    series = read_series_csv(args.input, args.column, args.label_column)
    values, labels = series.values, series.labels
    prep: dict = {"n_raw": int(values.size)}
    if args.diff_lag is not None:
        values = seasonal_difference(values, args.diff_lag)
        labels = labels[args.diff_lag:] if labels is not None else None
        prep["diff_lag"] = args.diff_lag
    if args.detrend_degree is not None:
        fit = fit_polynomial_trend(values, args.detrend_degree, test_residuals=False)
        values = values - fit.fitted
        prep["detrend"] = {"degree": fit.degree, "coefficients": fit.coefficients,
                           "basis": "powers of t = i/n, increasing"}
    return TimeSeries(values, labels), prep


def _header(args, cfg: TestConfig) -> dict:
    return {"command": args.command, "version": __version__, "seed": cfg.seed, "config": cfg.to_dict()}


def _blocks(x: np.ndarray, cfg: TestConfig) -> dict:
    sch = make_block_scheme(x.size, cfg.s)
    return {"block_length": sch.block_length, "means": local_block_means(x, sch),
            "sds": np.sqrt(local_block_variances(x, sch))}


def cmd_test(args) -> dict:
    cfg = _config(args)
    series, prep = _load(args)
    outcome = run_test(series.values, cfg)
    return {**_header(args, cfg), "input": args.input, "preprocessing": prep,
            "outcome": outcome.to_dict(), "blocks": _blocks(series.values, cfg)}


def cmd_segment(args) -> dict:
    cfg = _config(args)
    series, prep = _load(args)
    x = series.values
    cps = segment_recursively(x, cfg, min_segment=args.min_segment, exclusion_fraction=args.exclusion)
    fitted = piecewise_mean(x, cps.breaks)
    edges = [0, *cps.breaks, x.size]
    steps = [{"start": lo + 1, "end": hi, "mean": m}
             for lo, hi, m in zip(edges[:-1], edges[1:], cps.segment_means)]
    splits = [{"index": s.index, "label": series.label(s.index), "segment": [s.start + 1, s.stop],
               "outcome": s.outcome.to_dict()} for s in cps.splits]
    residual = None
    if cps.breaks:
        try:
            residual = run_test(x - fitted, cfg).to_dict()
        except GMDTrendError as exc:
            log.warning("residual test skipped: %s", exc)
    return {**_header(args, cfg), "input": args.input, "preprocessing": prep,
            "min_segment": args.min_segment, "exclusion": args.exclusion,
            "breaks": cps.breaks,
            "break_labels": [series.label(b) for b in cps.breaks] if series.labels else None,
            "segments": steps, "splits": splits, "piecewise_mean": fitted,
            "residual_test": residual}


def cmd_lrv(args) -> dict:
    cfg = _config(args)
    series, prep = _load(args)
    x = series.values
    sch = make_block_scheme(x.size, cfg.s)
    sub = make_subsampling_scheme(x.size, cfg.q, cfg.c0)
    return {**_header(args, cfg), "input": args.input, "preprocessing": prep,
            "kappa_tilde_x": kappa_tilde_x(x, sub), "kappa_hat": kappa_hat(x, sub, sch),
            "block_scheme": {"n": sch.n, "block_length": sch.block_length,
                             "block_count": sch.block_count, "discarded_tail": sch.discarded_tail},
            "subsampling_scheme": {"n": sub.n, "sub_length": sub.sub_length,
                                   "sub_count": sub.sub_count, "c0": sub.c0}}


def cmd_simulate(args) -> dict:
    cfg = _config(args)
    spec = load_scenarios(args.scenario)
    reps = args.replications or spec["replications"]
    if reps < 1:
        raise ConfigError("replications must be positive")
    head = {**_header(args, cfg), "scenario_file": args.scenario, "kind": spec["kind"],
            "replications": reps}
    if spec["kind"] == "lrv":
        rows = lrv_bias_rmse(spec["scenarios"], cfg, reps, cfg.seed)
        table = [{"scenario": r.scenario.to_dict(), "replications": r.replications,
                  "bias": r.bias, "rmse": r.rmse, "mean": r.mean} for r in rows]
    else:
        rows = rejection_rate_table(spec["scenarios"], cfg, reps, cfg.seed)
        table = [{"scenario": r.scenario.to_dict(), "replications": r.replications,
                  "rejections": r.rejections, "rate": r.rate} for r in rows]
    return {**head, "table": table}


COMMANDS = {"test": cmd_test, "segment": cmd_segment, "lrv": cmd_lrv, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        doc = COMMANDS[args.command](args)
        text = dumps(doc)
    except GMDTrendError as exc:
        print(f"gmdtrend: error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.output:
        write_atomic(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
