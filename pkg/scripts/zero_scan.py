"""Scan critical-line zeros and compare the running count with the
Riemann-von Mangoldt main terms."""
import argparse
import math

from zetacurves.verify import scan_zeros, zero_count_estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-max", type=float, default=100.0)
    ap.add_argument("--step", type=float, default=0.05)
    args = ap.parse_args()

    zeros = scan_zeros(args.t_max, args.step)
    for i, z in enumerate(zeros, 1):
        line = f"{i:3d}  t = {z.t:.12f}  simple={z.simple}"
        if z.t > 2 * math.pi * math.e:
            line += f"  N(t) - estimate = {i - zero_count_estimate(z.t):+.3f}"
        print(line)
    gaps = [b.t - a.t for a, b in zip(zeros, zeros[1:])]
    if gaps:
        print(f"smallest gap {min(gaps):.4f} (scan step {args.step})")


if __name__ == "__main__":
    main()
