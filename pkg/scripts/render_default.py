"""Render the default picture (PNG + SVG) and print curve statistics."""
import argparse
import time
from collections import Counter

from zetacurves import extract_curve_set, render_raster, render_vector, sample_phase_field
from zetacurves.field import Window
from zetacurves.render import RenderStyle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="alien.png")
    ap.add_argument("--size", default="1600x1000")
    ap.add_argument("--line-px", type=int, default=2)
    args = ap.parse_args()
    w, h = map(int, args.size.lower().split("x"))
    style = RenderStyle(width=w, height=h, line_px=args.line_px)

    t0 = time.perf_counter()
    field = sample_phase_field(Window(-6, 7, -45, 45, w, h))
    t1 = time.perf_counter()
    curves = extract_curve_set(field)
    render_raster(field, style).save(args.out)
    render_vector(curves, style).save(args.out.rsplit(".", 1)[0] + ".svg")
    t2 = time.perf_counter()

    print(f"sampled {w * h} points in {t1 - t0:.2f} s, curves + images in {t2 - t1:.2f} s")
    print("blue:", Counter(c.classification.value for c in curves.blue))
    print("green:", Counter(c.classification.value for c in curves.green))


if __name__ == "__main__":
    main()
