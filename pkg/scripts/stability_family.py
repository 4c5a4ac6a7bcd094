"""H^1 / H^{-1/2} ratio over the torque family phi_n^a, n <= 8, at several frequencies."""

import argparse
import math

from viscotorsion import CylinderGeometry, MaterialParams, single_mode
from viscotorsion.verify import stability_ratio

MU = (1 + 0.3j) * 1e6


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--modes", type=int, default=8)
    ap.add_argument("--freqs", default="10,100,1000")
    args = ap.parse_args()
    geom = CylinderGeometry(0.01, 0.05)
    for hz in (float(s) for s in args.freqs.split(",")):
        mat = MaterialParams(2 * MU, MU, 1000.0, 2 * math.pi * hz)
        rep = stability_ratio([single_mode(mat, geom, n) for n in range(1, args.modes + 1)])
        ratios = " ".join(f"{r:.3e}" for r in rep.ratios)
        print(f"{hz:>7.0f} Hz  spread={rep.spread:8.2f}  ratios: {ratios}")


if __name__ == "__main__":
    main()
