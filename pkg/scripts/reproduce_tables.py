#!/usr/bin/env python3
"""Recompute the k=1 reference table and a wider ratio table.

    python3 scripts/reproduce_tables.py --n-limit 1000 --out ratios.csv
"""
import argparse
import sys
import time

from crankscope import asymptotics, exact_core
from crankscope.config import RunConfig, set_config


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[1])
    ap.add_argument("--n-limit", type=int, default=1000)
    ap.add_argument("--m", type=int, nargs="*", default=[0, 1, 2, 5, 10])
    ap.add_argument("--n", type=int, nargs="*", default=[20, 50, 100, 200, 500, 1000])
    ap.add_argument("--cache-dir")
    ap.add_argument("--out", help="CSV for the wider ratio table (default stdout)")
    args = ap.parse_args(argv)

    set_config(RunConfig.resolve(cache_dir=args.cache_dir))
    cache = exact_core.default_cache()
    t0 = time.time()
    checks = asymptotics.verify_reference_table(args.n_limit, cache=cache)
    print(f"reference cells ({time.time() - t0:.1f}s):", file=sys.stderr)
    for c in checks:
        print(f"  {'ok ' if c.ok else 'BAD'} {c.cell:<14} expected {c.expected:<16} got {c.got}", file=sys.stderr)

    ns = [n for n in args.n if n <= args.n_limit]
    rows = asymptotics.ratio_table(1, ns, args.m, cache=cache)
    if args.out:
        with open(args.out, "w") as fh:
            asymptotics.rows_to_csv(rows, fh)
    else:
        sys.stdout.write(asymptotics.rows_to_csv(rows))
    return 0 if all(c.ok for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
