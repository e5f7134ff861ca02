"""Command line: ``zetacurves {eval,render,zeros,verify}``.

Exit codes: 0 ok / claim consistent, 1 claim violated, 2 usage, 3 pole, 4 I/O.

Settings come from (lowest to highest priority) built-in defaults, a flat
``key = value`` config file (``--config`` or ``$ZETA_CONFIG``), then flags.
Config keys are the long flag names without dashes, e.g.::

    window = -6,7,-45,45
    size = 1600x1000
    pole-radius = 0.05
    svg = true
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .contour import Classification, extract_curve_set
from .field import PhaseField, Window, sample_phase_field
from .render import RenderStyle, render_raster, render_vector
from .verify import MAX_SCAN_T, scan_zeros, topology_report, zero_count_estimate, zeros_to_csv
from .zfn import (
    EvalConfig,
    PoleOfZ,
    ZetaError,
    log_completed_zeta,
    log_gamma_factor,
    zeta,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_POLE, EXIT_IO = 0, 1, 2, 3, 4

DEFAULT_WINDOW = (-6.0, 7.0, -45.0, 45.0)
DEFAULT_SIZE = (1600, 1000)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str = ""
    window: tuple[float, float, float, float] = DEFAULT_WINDOW
    size: tuple[int, int] = DEFAULT_SIZE
    tol: float = 1e-15
    terms: int = 32
    pole_radius: float = 0.05
    out: str | None = None
    svg: bool = False
    threads: int = 0
    t_max: float = 50.0
    step: float = 0.05
    field_cache: str | None = None
    line_px: int = 1

    def eval_config(self) -> EvalConfig:
        return EvalConfig(series_terms=self.terms, rel_tol=self.tol, pole_radius=self.pole_radius)

    def make_window(self) -> Window:
        return Window(*self.window, *self.size)

    def style(self) -> RenderStyle:
        return RenderStyle(width=self.size[0], height=self.size[1], line_px=self.line_px)


# ----------------------------------------------------------------- parsing


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("I", "i").replace("i", "j")
    try:
        z = complex(t)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r} (expected a+bi)") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise UsageError(f"non-finite complex number {text!r}")
    return z


def _parse_window(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError(f"--window needs sigma_min,sigma_max,t_min,t_max, got {text!r}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad --window {text!r}") from None
    return vals  # type: ignore[return-value]


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise UsageError(f"--size needs WxH, got {text!r}") from None


def _parse_bool(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"bad boolean {text!r}")


_CONVERTERS = {
    "window": _parse_window,
    "size": _parse_size,
    "tol": float,
    "terms": int,
    "pole-radius": float,
    "out": str,
    "svg": _parse_bool,
    "threads": int,
    "t-max": float,
    "step": float,
    "field-cache": str,
    "line-px": int,
    "width": int,
    "height": int,
}


def read_config_file(path: str) -> dict[str, object]:
    values: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, val = (p.strip() for p in line.split("=", 1))
            key = key.replace("_", "-")
            if key not in _CONVERTERS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _CONVERTERS[key](val)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {val!r}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value settings file (default $ZETA_CONFIG)")
    common.add_argument("--window", help="sigma_min,sigma_max,t_min,t_max")
    common.add_argument("--size", help="WxH samples / pixels")
    common.add_argument("--width", help="overrides the W of --size")
    common.add_argument("--height", help="overrides the H of --size")
    common.add_argument("--tol", help="target relative accuracy")
    common.add_argument("--terms", help="minimum accelerated-series depth")
    common.add_argument("--pole-radius", help="exclusion radius around s = 0 and s = 1")
    common.add_argument("--out", help="output path")
    common.add_argument("--threads", help="worker cap, 0 = one per CPU")

    p = argparse.ArgumentParser(prog="zetacurves", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    e = sub.add_parser("eval", parents=[common], help="print zeta(s), Z(s) and the colour predicate")
    e.add_argument("s", help="complex number, e.g. 0.5+14.134725i")

    r = sub.add_parser("render", parents=[common], help="write the PNG (and optional SVG)")
    r.add_argument("--svg", action="store_const", const="true", help="also write an SVG next to the PNG")
    r.add_argument("--line-px", help="stroke half-width in pixels")
    r.add_argument("--field-cache", help="read/write the sampled phase field here")

    z = sub.add_parser("zeros", parents=[common], help="scan critical-line zeros to CSV")
    z.add_argument("--t-max", help="upper end of the scan (<= 100)")
    z.add_argument("--step", help="scan step (<= 0.25)")

    sub.add_parser("verify", parents=[common], help="audit green-curve crossings, write JSON")
    return p


def resolve_config(ns: argparse.Namespace, env=os.environ) -> RunConfig:
    values: dict[str, object] = {}
    cfg_path = ns.config or env.get("ZETA_CONFIG")
    if cfg_path:
        values.update(read_config_file(cfg_path))
    for key in _CONVERTERS:
        attr = key.replace("-", "_")
        raw = getattr(ns, attr, None)
        if raw is None:
            continue
        try:
            values[key] = _CONVERTERS[key](raw)
        except ValueError:
            raise UsageError(f"bad value for --{key}: {raw!r}") from None

    rc = RunConfig(subcommand=ns.subcommand)
    size = list(values.pop("size", rc.size))
    if "width" in values:
        size[0] = values.pop("width")
    if "height" in values:
        size[1] = values.pop("height")
    rc.size = (int(size[0]), int(size[1]))
    for key, val in values.items():
        setattr(rc, key.replace("-", "_"), val)
    _validate(rc)
    return rc


def _validate(rc: RunConfig) -> None:
    try:
        rc.eval_config()
        rc.make_window()
        if rc.subcommand == "render":
            rc.style()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if rc.threads < 0:
        raise UsageError("--threads must be >= 0")
    if rc.subcommand == "zeros":
        if not (0 < rc.step <= 0.25):
            raise UsageError("--step must lie in (0, 0.25]")
        if not (0 < rc.t_max <= MAX_SCAN_T):
            raise UsageError(f"--t-max must lie in (0, {MAX_SCAN_T:g}]")


# ----------------------------------------------------------------- commands


def _num(x: float) -> float:
    return float(f"{x:.15g}")


def _check_writable(path: str) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path}")
    if Path(path).is_dir():
        raise OSError(f"{path} is a directory")


def predicate(log_z, log_gamma_part: complex | None) -> str:
    """'blue', 'green', 'zero (blue∩green)' or 'neither' at one point."""
    # a zero of Z means |zeta| is tiny where the gamma factor is finite
    if log_gamma_part is not None and log_z.log_modulus - log_gamma_part.real < math.log(1e-6):
        return "zero (blue∩green)"
    if abs(math.sin(log_z.phase)) <= 1e-8:
        return "blue"
    if abs(math.cos(log_z.phase)) <= 1e-8:
        return "green"
    return "neither"


def cmd_eval(rc: RunConfig, text: str, out=None) -> int:
    out = out or sys.stdout
    s = parse_complex(text)
    cfg = rc.eval_config()
    try:
        lz = log_completed_zeta(s, cfg)
    except PoleOfZ as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_POLE
    g = log_gamma_factor(s)
    zeta_val = zeta(s, cfg)
    z_lin = lz.to_complex()
    record = {
        "s": [_num(s.real), _num(s.imag)],
        "zeta": [_num(zeta_val.real), _num(zeta_val.imag)],
        "Z": [_num(z_lin.real), _num(z_lin.imag)],
        "log_abs_Z": _num(lz.log_modulus),
        "arg_Z": _num(lz.phase),
        "predicate": predicate(lz, g),
    }
    print(json.dumps(record, ensure_ascii=False), file=out)
    return EXIT_OK


def _field(rc: RunConfig) -> PhaseField:
    window = rc.make_window()
    cache = rc.field_cache
    if cache and Path(cache).is_file():
        field = PhaseField.load(cache)
        if field.window == window:
            return PhaseField(field.window, field.phase, field.valid, rc.eval_config())
    field = sample_phase_field(window, rc.eval_config(), rc.threads)
    if cache:
        field.save(cache)
    return field


def cmd_render(rc: RunConfig, out=None) -> int:
    out = out or sys.stdout
    png = rc.out or "zeta.png"
    _check_writable(png)
    field = _field(rc)
    image = render_raster(field, rc.style())
    curves = extract_curve_set(field)
    image.save(png)
    written = [png]
    if rc.svg:
        svg = str(Path(png).with_suffix(".svg"))
        render_vector(curves, rc.style()).save(svg)
        written.append(svg)
    eyes = sum(c.classification is Classification.EYES for c in curves.green)
    print(f"wrote {', '.join(written)}: {len(curves.blue)} blue curves, "
          f"{len(curves.green)} green curves ({eyes} eyes)", file=out)
    return EXIT_OK


def cmd_zeros(rc: RunConfig, out=None) -> int:
    out = out or sys.stdout
    path = rc.out or "zeros.csv"
    _check_writable(path)
    zeros = scan_zeros(rc.t_max, rc.step, rc.eval_config(), rc.threads)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(zeros_to_csv(zeros))
    msg = f"{len(zeros)} zeros with 0 < t <= {rc.t_max:g} written to {path}"
    if rc.t_max > 2 * math.pi * math.e:
        est = zero_count_estimate(rc.t_max)
        msg += f"; Riemann-von Mangoldt estimate {est:.15g} (difference {len(zeros) - est:+.15g})"
    print(msg, file=out)
    return EXIT_OK


def cmd_verify(rc: RunConfig, out=None) -> int:
    out = out or sys.stdout
    path = rc.out or "report.json"
    _check_writable(path)
    report = topology_report(rc.make_window(), cfg=rc.eval_config(), threads=rc.threads)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.to_json())
    print(report.summary, file=out)
    if not report.consistent:
        print("note: crossing counts are resolution dependent; rerun with a finer --size "
              "before reading this as a counterexample", file=out)
        return EXIT_VIOLATION
    return EXIT_OK


def _glue_values(argv: list[str]) -> list[str]:
    # "--window -6,7,-45,45" would otherwise read as an unknown option
    out: list[str] = []
    it = iter(argv)
    for arg in it:
        if arg in ("--window",):
            nxt = next(it, None)
            out.append(arg if nxt is None else f"{arg}={nxt}")
        else:
            out.append(arg)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_values(sys.argv[1:] if argv is None else list(argv))
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors already exit with 2
        return int(exc.code or 0)
    try:
        rc = resolve_config(ns)
        if ns.subcommand == "eval":
            return cmd_eval(rc, ns.s)
        if ns.subcommand == "render":
            return cmd_render(rc)
        if ns.subcommand == "zeros":
            return cmd_zeros(rc)
        return cmd_verify(rc)
    except UsageError as exc:
        print(f"zetacurves: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"zetacurves: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ZetaError as exc:
        print(f"zetacurves: error: {exc}", file=sys.stderr)
        return EXIT_POLE


if __name__ == "__main__":
    sys.exit(main())
