"""How the topology audit of a strip changes with grid resolution.

For each size, prints curve tallies, crossing count, whether every crossing
pairs with a scanned zero, and the verdict.
"""
import argparse
import time

from zetacurves.field import Window
from zetacurves.verify import topology_report

SIZES = [(100, 60), (200, 120), (400, 225), (800, 450), (1600, 900)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--window", default="-6,7,2,50", help="sigma_min,sigma_max,t_min,t_max")
    args = ap.parse_args()
    bounds = [float(v) for v in args.window.split(",")]

    print(f"{'size':>10} {'eyes':>5} {'bound':>6} {'nonEyes':>8} {'cross':>6} {'bij':>4} {'ok':>4} {'sec':>6}")
    for nx, ny in SIZES:
        t0 = time.perf_counter()
        r = topology_report(Window(*bounds, nx, ny))
        dt = time.perf_counter() - t0
        print(f"{nx}x{ny:<5} {r.eyes_curves:5d} {r.boundary_curves:6d} {r.green_noneyes_curves:8d} "
              f"{len(r.crossings):6d} {str(r.bijection_ok)[0]:>4} {str(r.consistent)[0]:>4} {dt:6.2f}")


if __name__ == "__main__":
    main()
