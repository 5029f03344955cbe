#!/usr/bin/env python3
"""Run every residual suite and print a compact report.

    python3 scripts/run_suites.py [--suites euler modular ...] [--json out.json]
"""
import argparse
import json
import sys
import time

from crankscope.verification import SUITES, run_suite


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[1])
    ap.add_argument("--suites", nargs="*", default=list(SUITES), choices=list(SUITES))
    ap.add_argument("--json", help="write all check records here")
    args = ap.parse_args(argv)

    records, failed = [], 0
    for name in args.suites:
        t0 = time.time()
        checks = run_suite(name)
        bad = [c for c in checks if not c.ok]
        failed += len(bad)
        print(f"{name:<9} {len(checks) - len(bad):>3}/{len(checks)} passed  ({time.time() - t0:.1f}s)")
        for c in bad:
            print(f"    FAIL {c.name}: {c.value:.4g} vs {c.threshold:.4g} {c.detail}")
        records += [c.as_record() for c in checks]
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(records, fh, indent=1)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
