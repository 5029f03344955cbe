"""crankscope command line.

    crankscope crank-table --k 1 --n-max 50 -o table.csv
    crankscope verify-tables [--n-limit 50 | --full]
    crankscope verify euler|modular|dominant|minor|circle|bessel
    crankscope asymptotic --k 1 --n 1000 --m 1
    crankscope circle --k 1 --n 30 --m 1
    crankscope cache info|clear

Results go to stdout (or --output), progress and the PASS/FAIL summary to
stderr.  The exit status is 0 only if every check passed.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time

import mpmath

from . import asymptotics, circle_method, exact_core
from .config import RunConfig, set_config
from .exact_core import SeriesCache, TruncationLimitError
from .special_functions import precision
from .verification import RECORD_COLUMNS, SUITES, run_suite

log = logging.getLogger("crankscope")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(records: list[dict], columns, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps([{c: r.get(c) for c in columns} for r in records], indent=1) + "\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow(["" if r.get(c) is None else r.get(c) for c in columns])


def _open_out(args):
    return open(args.output, "w", newline="") if getattr(args, "output", None) else sys.stdout


def _cache(cfg: RunConfig) -> SeriesCache:
    return SeriesCache(cfg.cache_dir, cfg.truncation_limit)


def cmd_crank_table(args, cfg: RunConfig) -> int:
    if args.n_max < 0:
        print("error: --n-max must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    if args.n_max > cfg.truncation_limit:
        print(f"error: --n-max {args.n_max} exceeds truncation limit {cfg.truncation_limit}", file=sys.stderr)
        return EXIT_FAIL
    m_range = None if args.m_min is None and args.m_max is None else (
        args.m_min if args.m_min is not None else -args.n_max,
        args.m_max if args.m_max is not None else args.n_max)
    t0 = time.time()
    table = exact_core.CrankTable.build(args.k, args.n_max, m_range, cache=_cache(cfg))
    log.info("C_%d through q^%d in %.1fs", args.k, args.n_max, time.time() - t0)
    rows = [{"k": args.k, "n": n, "m": m, "M": v}
            for (m, n), v in sorted(table.entries.items(), key=lambda kv: (kv[0][1], kv[0][0]))]
    out = _open_out(args)
    try:
        _emit(rows, ("k", "n", "m", "M"), cfg.output_format, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_verify_tables(args, cfg: RunConfig) -> int:
    n_limit = 1000 if args.full else args.n_limit
    log.info("reproducing reference table cells with n <= %d", n_limit)
    checks = asymptotics.verify_reference_table(n_limit, cache=_cache(cfg))
    records = [{"cell": c.cell, "expected": c.expected, "got": c.got, "status": "PASS" if c.ok else "FAIL"}
               for c in checks]
    out = _open_out(args)
    try:
        _emit(records, ("cell", "expected", "got", "status"), cfg.output_format, out)
    finally:
        if out is not sys.stdout:
            out.close()
    cells = [c for c in checks if not c.cell.startswith("ratio")]
    ratios = [c for c in checks if c.cell.startswith("ratio")]
    ok_cells = sum(c.ok for c in cells)
    ok_ratios = sum(c.ok for c in ratios)
    passed = ok_cells == len(cells) and ok_ratios == len(ratios)
    for c in checks:
        if not c.ok:
            print(f"FAIL {c.cell}: expected {c.expected}, got {c.got}", file=sys.stderr)
    print(f"{'PASS' if passed else 'FAIL'} {ok_cells}/{len(cells)} cells, {ok_ratios}/{len(ratios)} ratios",
          file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


SUITE_OPTIONS = {"euler": (), "modular": (), "bessel": ("m", "k"),
                 "dominant": ("n", "m", "k"), "minor": ("n", "m", "k"), "circle": ("n", "m", "k")}


def cmd_verify(args, cfg: RunConfig) -> int:
    kwargs = {}
    for name in ("n", "m", "k"):
        v = getattr(args, name)
        if v is None:
            continue
        if name not in SUITE_OPTIONS[args.suite]:
            print(f"error: --{name} does not apply to suite {args.suite}", file=sys.stderr)
            return EXIT_USAGE
        kwargs[name] = v
    log.info("running suite %s", args.suite)
    checks = run_suite(args.suite, **kwargs)
    out = _open_out(args)
    try:
        _emit([c.as_record() for c in checks], RECORD_COLUMNS, cfg.output_format, out)
    finally:
        if out is not sys.stdout:
            out.close()
    bad = [c for c in checks if not c.ok]
    for c in bad:
        print(f"FAIL {c.name}: {c.value:.6g} vs {c.threshold:.6g}", file=sys.stderr)
    print(f"{'PASS' if not bad else 'FAIL'} {len(checks) - len(bad)}/{len(checks)} {args.suite} checks",
          file=sys.stderr)
    return EXIT_OK if not bad else EXIT_FAIL


def cmd_asymptotic(args, cfg: RunConfig) -> int:
    try:
        row = asymptotics.table_row(args.k, args.n, args.m, cache=_cache(cfg), allow_missing=True)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rec = row.as_record()
    if row.M_exact is None:
        rec["M_exact"] = "unavailable"
        log.info("n=%d is beyond the truncation limit %d; exact count unavailable", args.n, cfg.truncation_limit)
    _emit([rec], asymptotics.COLUMNS, cfg.output_format, sys.stdout)
    return EXIT_OK


def cmd_circle(args, cfg: RunConfig) -> int:
    records = []
    with precision():
        res = circle_method.cauchy_coefficient(args.k, args.m, args.n)
        records.append({"label": "cauchy", "k": args.k, "n": args.n, "m": args.m,
                        "value": mpmath.nstr(res.value, 20), "tolerance": res.error, "nodes": res.nodes})
        if args.m >= 1:
            ws = circle_method.wright_split(args.k, args.m, args.n)
            for r in ws.records:
                rec = r.to_json()
                rec["value"] = mpmath.nstr(ws.M_major if r.label == "major" else ws.E_minor, 20)
                records.append(rec)
    if args.dump:
        with open(args.dump, "w") as fh:
            json.dump(records, fh, indent=1)
    _emit(records, ("label", "k", "n", "m", "value", "tolerance", "nodes"), cfg.output_format, sys.stdout)
    return EXIT_OK


def cmd_cache(args, cfg: RunConfig) -> int:
    cache = _cache(cfg)
    if args.action == "info":
        rows = cache.info()
        print(f"cache directory: {cfg.cache_dir}", file=sys.stderr)
        _emit(rows, ("k", "N", "bytes", "path"), cfg.output_format, sys.stdout)
    else:
        removed = cache.clear()
        print(f"removed {removed} file(s) from {cfg.cache_dir}", file=sys.stderr)
    return EXIT_OK


def _global_options(default) -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--precision-bits", type=int, default=default, help="working precision (default 256)")
    g.add_argument("--cache-dir", default=default, help="directory for cached expansions")
    g.add_argument("--config", default=default, help="JSON config file")
    g.add_argument("--format", dest="output_format", choices=("csv", "json"), default=default)
    g.add_argument("--truncation-limit", type=int, default=default)
    g.add_argument("-v", "--verbose", action="store_true",
                   default=False if default is None else default, help="progress messages on stderr")
    return g


def build_parser() -> argparse.ArgumentParser:
    top = _global_options(None)
    # SUPPRESS keeps a subcommand from overwriting a flag given before it
    common = _global_options(argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="crankscope", description=__doc__.split("\n")[0], parents=[top])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crank-table", parents=[common], help="exact M_k(m, n) for n <= n-max")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--m-min", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_crank_table)

    p = sub.add_parser("verify-tables", parents=[common], help="recompute the reference k=1 table")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n-limit", type=int, default=500, help="only cells with n <= this (default 500)")
    g.add_argument("--full", action="store_true", help="include the n = 1000 cells")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify_tables)

    p = sub.add_parser("verify", parents=[common], help="run a residual suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("asymptotic", parents=[common], help="exact count vs sech^2 main term")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    p.set_defaults(func=cmd_asymptotic)

    p = sub.add_parser("circle", parents=[common], help="Cauchy integral and major/minor split")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--dump", help="write per-arc JSON records here")
    p.set_defaults(func=cmd_circle)

    p = sub.add_parser("cache", parents=[common], help="inspect or clear cached expansions")
    p.add_argument("action", choices=("info", "clear"))
    p.set_defaults(func=cmd_cache)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = RunConfig.resolve(args.config, precision_bits=args.precision_bits, cache_dir=args.cache_dir,
                                output_format=args.output_format, truncation_limit=args.truncation_limit)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    set_config(cfg)
    exact_core.reset_default_cache()
    try:
        return args.func(args, cfg)
    except TruncationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    finally:
        set_config(None)
        exact_core.reset_default_cache()


if __name__ == "__main__":
    sys.exit(main())
