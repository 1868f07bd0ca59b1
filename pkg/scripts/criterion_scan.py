#!/usr/bin/env python3
"""Scan the lattice criterion over densities rho*(x)^(-gamma) dx.

For gamma above the critical value the per-scale sums stay bounded; the scan
makes the transition visible.

Usage: python3 scripts/criterion_scan.py [p] [samples_per_shell]
"""

import sys

import numpy as np

from anisomult.geometry import build_geometry
from anisomult.measure import criterion_sup, discretize_density


def main():
    p = float(sys.argv[1]) if len(sys.argv) > 1 else 1.5
    samples = int(sys.argv[2]) if len(sys.argv) > 2 else 64
    geo = build_geometry(np.array([[2.0, 1.0], [0.0, 2.0]]))
    print(f"# matrix [[2,1],[0,2]], p={p}, q={2/(2-p):.3f}")
    print(f"{'gamma':>6} {'sup':>12} {'argmax k':>9} {'endpoint':>9}")
    for gamma in (0.5, 0.8, 1.0, 1.2, 1.5, 2.0):
        mu = discretize_density(gamma, geo, (-5, 5), samples, seed=0)
        rep = criterion_sup(mu, geo, (-8, 8), p)
        print(f"{gamma:6.2f} {rep.sup_value:12.6f} {rep.argmax_k:9d} "
              f"{str(rep.sup_at_endpoint):>9}")


if __name__ == "__main__":
    main()
