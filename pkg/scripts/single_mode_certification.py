"""Certify the w_2 solution on a 64^3 sample and sweep the FD step.

    python3 scripts/single_mode_certification.py [--out out/single_mode]
"""

import argparse
import json
import math
import time
from pathlib import Path

from viscotorsion import CylinderGeometry, MaterialParams, single_mode
from viscotorsion.verify import GridSpec, boundary_residuals, pde_residual

MU = (1 + 0.3j) * 1e6


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/single_mode")
    ap.add_argument("--n", type=int, default=2)
    args = ap.parse_args()

    mat = MaterialParams(2 * MU, MU, 1000.0, 2 * math.pi * 10)
    geom = CylinderGeometry(0.01, 0.05)
    sol = single_mode(mat, geom, args.n)

    rows = []
    base = 1e-3 * min(geom.a, geom.h)
    for s in (1.0, 0.5, 0.25, 0.125):
        t0 = time.perf_counter()
        val, info = pde_residual(sol, GridSpec(64, 64, 64, base * s, 5 * base), details=True)
        rows.append({"step": base * s, "pde_residual": val,
                     "relative_to_inertia": info["relative_to_inertia"],
                     "seconds": time.perf_counter() - t0})
        print(f"step={base * s:.2e}  residual={val:.3e}  (inertia-normalised {info['relative_to_inertia']:.3e})")
    for a, b in zip(rows, rows[1:]):
        print(f"  halving factor {a['pde_residual'] / b['pde_residual']:.3f}")

    bc = boundary_residuals(sol)
    for k, v in bc.items():
        print(f"{k:>24}: {v}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "certification.json").write_text(json.dumps({"sweep": rows, "bc": bc}, indent=2))


if __name__ == "__main__":
    main()
