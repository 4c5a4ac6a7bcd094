"""Dini truncation error and H^{-1/2} diagnostic against N for several torques.

Writes a tidy CSV (torque, N, dini_error, h_half_diag, suggested_N).
"""

import argparse
import csv
import math
from pathlib import Path

from viscotorsion import CylinderGeometry, MaterialParams, Torque, assemble
from viscotorsion.verify import dini_truncation_error

MU = (1 + 0.3j) * 1e6


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/truncation")
    ap.add_argument("--sizes", default="4,8,16,32,64")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    mat = MaterialParams(2 * MU, MU, 1000.0, 2 * math.pi * 10)
    geom = CylinderGeometry(0.01, 0.05)
    torques = {
        "linear": Torque("linear", geom.a),
        "power_p2": Torque("power", geom.a, {"p": 2}),
        "power_p3": Torque("power", geom.a, {"p": 3}),
        "power_p0.5": Torque("power", geom.a, {"p": 0.5}),
    }
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "truncation.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["torque", "N", "dini_error", "h_half_diag", "suggested_N"])
        for name, f in torques.items():
            for N in sizes:
                sol = assemble(mat, geom, f, N)
                err = dini_truncation_error(sol)
                w.writerow([name, N, repr(err), repr(sol.spectrum.h_half_diag), sol.suggested_truncation])
                print(f"{name:>11} N={N:<3} dini={err:.3e} suggested N'={sol.suggested_truncation}")


if __name__ == "__main__":
    main()
