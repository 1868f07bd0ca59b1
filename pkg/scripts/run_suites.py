#!/usr/bin/env python3
"""Run every verification suite and print a one-line summary each.

Usage: python3 scripts/run_suites.py [seed]
"""

import sys
import time

from anisomult.suites import SUITES, run_suite


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    failed = 0
    for name in sorted(SUITES):
        t0 = time.time()
        rep = SUITES[name](seed=seed)
        status = "ok" if rep.passed else "FAILED"
        headline = {k: round(v, 6) for k, v in rep.metrics.items()
                    if isinstance(v, float)}
        print(f"{name:16s} {status:6s} {time.time() - t0:5.1f}s {headline}")
        failed += not rep.passed
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
