#!/usr/bin/env python3
"""Scale-stability table for the kernel-multiplication lemma ratios.

Prints the H^1-proxy / L^r-norm ratios across scales for several smoothness
exponents lambda; the table should be flat in k whenever lambda clears the
threshold.

Usage: python3 scripts/lemma_scaling.py [r]
"""

import sys

import numpy as np

from anisomult.geometry import build_geometry
from anisomult.spectral import Grid
from anisomult import hardy


def main():
    r = float(sys.argv[1]) if len(sys.argv) > 1 else 2.0
    geo = build_geometry(np.array([[2.0]]))
    grid = Grid.centered(np.array([32.0]), 4096)
    fam = hardy.build_lp_family(geo, grid, hardy.default_j_range(geo, grid),
                                certified_shells=(-2, 4))
    thr = hardy.lambda_threshold(geo, r)
    print(f"# r={r}, lambda threshold = {thr:.4f}")
    ks = range(-2, 3)
    header = "lambda " + " ".join(f"k={k:+d}" for k in ks) + "   max/min"
    print(header)
    for lam in (1.0, 1.5, 2.0, 3.0):
        tab = hardy.lemma_lr_experiment(fam, ks, lam=lam, r=r, seed=0)
        vals = [tab[k] for k in ks]
        row = f"{lam:6.2f} " + " ".join(f"{v:.4f}" for v in vals)
        print(row + f"   {max(vals)/min(vals):.4f}")


if __name__ == "__main__":
    main()
