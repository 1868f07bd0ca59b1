#!/usr/bin/env python3
"""Print the derived geometry for a dilation matrix.

Usage: python3 scripts/geometry_report.py "[[2,1],[0,2]]"
"""

import json
import sys

import numpy as np

from anisomult.geometry import build_geometry, geometry_report, triangle_constant


def main():
    mat = np.asarray(json.loads(sys.argv[1]) if len(sys.argv) > 1
                     else [[2.0, 1.0], [0.0, 2.0]], dtype=float)
    geo = build_geometry(mat)
    rep = geometry_report(geo)
    rep["triangle_constant_fit"] = triangle_constant(geo.qnorm, 48)
    print(json.dumps(rep, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
