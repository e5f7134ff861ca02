"""Numerical checks on the critical line and on the green/blue curve topology.

Everything here is in-window numerical evidence. Report wording is always
"consistent with", never "verified".
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .contour import (
    Classification,
    CurveSet,
    POLES,
    critical_line_crossing_points,
    count_critical_line_crossings,
    curve_pair_intersections,
    extract_curve_set,
)
from .field import Window, resolve_threads, sample_phase_field
from .zfn import (
    DEFAULT_CONFIG,
    LOG_PI,
    DomainError,
    EvalConfig,
    log_completed_zeta_array,
    log_gamma_array,
)

REALITY_TOL = 1e-6
BISECT_WIDTH = 1e-8
SLOPE_WIDTH = 1e-4
SLOPE_MIN = 1e-3
MAX_SCAN_T = 100.0
SCAN_CHUNK = 256


class RealityViolation(ArithmeticError):
    """arg Z(1/2 + it) is not 0 or pi: the evaluator is wrong."""


# ----------------------------------------------------------------- critical line


def _critical_line(t: np.ndarray, cfg: EvalConfig):
    s = 0.5 + 1j * np.asarray(t, dtype=float)
    log_mod, phase, ok = log_completed_zeta_array(s, cfg)
    return s, log_mod, phase, ok


def _reality_check(t, phase, ok) -> None:
    bad = ok & (np.abs(np.sin(np.where(ok, phase, 0.0))) > REALITY_TOL)
    if bad.any():
        i = int(np.argmax(bad))
        raise RealityViolation(
            f"arg Z(1/2 + {np.ravel(t)[i]!r}i) = {np.ravel(phase)[i]!r} is not a multiple of pi"
        )


def hardy_real_array(t, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Vectorised ``hardy_real``; exact zeros of zeta give 0.0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("hardy_real needs t >= 0")
    _, log_mod, phase, ok = _critical_line(t, cfg)
    _reality_check(t, phase, ok)
    sign = np.where(np.cos(np.where(ok, phase, 0.0)) < 0, -1.0, 1.0)
    return np.where(ok, sign * np.exp(np.where(ok, log_mod, -np.inf)), 0.0)


def hardy_real(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """The real number Z(1/2 + it).

    The sign survives underflow: for large t the result may be +0.0 or -0.0.
    Raises RealityViolation when |sin arg Z| exceeds 1e-6.
    """
    return float(hardy_real_array(np.array([float(t)]), cfg)[0])


def hardy_z(t, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Hardy's Z(t): the sign of Z(1/2 + it) times |zeta(1/2 + it)|.

    Same zeros and signs as ``hardy_real`` without the Gamma-factor decay, so
    slopes are on an O(1) scale.
    """
    t = np.asarray(t, dtype=float)
    s, log_mod, phase, ok = _critical_line(t, cfg)
    gamma_part = (-0.5 * s * LOG_PI + log_gamma_array(0.5 * s)).real
    sign = np.where(np.cos(np.where(ok, phase, 0.0)) < 0, -1.0, 1.0)
    return np.where(ok, sign * np.exp(np.where(ok, log_mod - gamma_part, -np.inf)), 0.0)


def _sign_at(t: float, cfg: EvalConfig) -> float:
    # bisection only needs the sign; skipping the reality gate keeps it usable
    # within rounding distance of a zero
    _, _, phase, ok = _critical_line(np.array([t]), cfg)
    if not ok[0]:
        return 0.0
    return -1.0 if math.cos(phase[0]) < 0 else 1.0


# ----------------------------------------------------------------- zero scan


@dataclass(frozen=True)
class ZeroRecord:
    t: float
    refined_tol: float
    simple: bool

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("zero ordinate must be positive")
        if not self.refined_tol <= 1e-6:
            raise ValueError("refined_tol must be <= 1e-6")


def _bisect(a: float, b: float, sa: float, cfg: EvalConfig) -> tuple[float, float]:
    while b - a > BISECT_WIDTH:
        m = 0.5 * (a + b)
        sm = _sign_at(m, cfg)
        if sm == 0.0:
            return m, 0.0
        if sm == sa:
            a = m
        else:
            b = m
    return 0.5 * (a + b), b - a


def _refine(a: float, b: float, sa: float, cfg: EvalConfig) -> ZeroRecord:
    t0, width = _bisect(a, b, sa, cfg)
    h = 0.5 * SLOPE_WIDTH
    za, zb = hardy_z(np.array([t0 - h, t0 + h]), cfg)
    slope = (zb - za) / SLOPE_WIDTH
    return ZeroRecord(t0, width, bool(abs(slope) > SLOPE_MIN))


def scan_grid(t_max: float, step: float) -> np.ndarray:
    n = int(math.floor(t_max / step + 1e-9))
    grid = step * np.arange(1, n + 1)
    if grid.size == 0 or grid[-1] < t_max:
        grid = np.append(grid, t_max)
    return grid


def scan_zeros(t_max: float, step: float = 0.05, cfg: EvalConfig = DEFAULT_CONFIG,
               threads: int | None = 1) -> list[ZeroRecord]:
    """Zeros of Z on the critical line with 0 < t <= t_max.

    Samples ``hardy_real`` every ``step`` starting at ``step``; each sign change
    is bisected to width <= 1e-8. A zero is flagged simple when the centred
    slope of Hardy's Z over a 1e-4 interval exceeds 1e-3 in magnitude.
    """
    if not (0.0 < step <= 0.25):
        raise ValueError(f"step must lie in (0, 0.25], got {step}")
    if not (t_max <= MAX_SCAN_T):
        raise ValueError(f"t_max must be <= {MAX_SCAN_T}, got {t_max}")
    if t_max < step:
        return []
    grid = scan_grid(t_max, step)
    vals = np.empty(grid.shape)
    chunks = range(0, grid.size, SCAN_CHUNK)

    def sample(i0: int) -> None:
        vals[i0:i0 + SCAN_CHUNK] = hardy_real_array(grid[i0:i0 + SCAN_CHUNK], cfg)

    def sign(v: float) -> float:
        return -1.0 if math.copysign(1.0, v) < 0 else 1.0

    workers = resolve_threads(threads)
    if workers == 1:
        for i0 in chunks:
            sample(i0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(sample, chunks))

    brackets = []
    for i in range(grid.size - 1):
        sa, sb = sign(vals[i]), sign(vals[i + 1])
        if sa != sb:
            brackets.append((float(grid[i]), float(grid[i + 1]), sa))
    if workers == 1:
        return [_refine(a, b, sa, cfg) for a, b, sa in brackets]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda br: _refine(*br, cfg), brackets))


def zero_count_estimate(T: float) -> float:
    """Riemann-von Mangoldt main terms: (T/2pi) ln(T/2pi) - T/2pi + 7/8."""
    if not T > 2.0 * math.pi * math.e:
        raise DomainError(f"estimate needs T > 2 pi e, got {T}")
    x = T / (2.0 * math.pi)
    return x * math.log(x) - x + 0.875


def zeros_to_csv(zeros: list[ZeroRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "t", "tol", "simple"])
    for i, z in enumerate(zeros, start=1):
        writer.writerow([i, f"{z.t:.15g}", f"{z.refined_tol:.15g}", "true" if z.simple else "false"])
    return buf.getvalue()


# ----------------------------------------------------------------- topology


@dataclass
class TopologyReport:
    window: Window
    zeros: list[ZeroRecord]
    green_noneyes_curves: int
    curves_with_one_crossing: int
    eyes_curves: int
    boundary_curves: int
    violations: list[dict]
    # evidence beyond the pass/fail fields
    boundary_curves_with_one_crossing: int = 0
    crossings: list[dict] = dc_field(default_factory=list)
    unmatched_zeros: list[float] = dc_field(default_factory=list)
    unmatched_crossings: list[list[float]] = dc_field(default_factory=list)
    off_line_meetings: list[dict] = dc_field(default_factory=list)

    @property
    def bijection_ok(self) -> bool:
        return not self.unmatched_zeros and not self.unmatched_crossings

    @property
    def consistent(self) -> bool:
        return not self.violations and self.bijection_ok

    @property
    def summary(self) -> str:
        w = self.window
        where = f"sigma in [{w.sigma_min:g}, {w.sigma_max:g}], t in [{w.t_min:g}, {w.t_max:g}] at {w.nx}x{w.ny}"
        if self.consistent:
            return (f"consistent with the claim in-window ({where}): "
                    f"{self.green_noneyes_curves} non-eyes green curves, each crossing the critical line once; "
                    f"{self.eyes_curves} eyes curves; {self.boundary_curves} boundary curves "
                    f"({self.boundary_curves_with_one_crossing} with one crossing); "
                    f"{len(self.crossings)} crossings matched one-to-one with zeros; "
                    f"no green/blue meetings off the critical line. "
                    f"Numerical evidence only, conditional on RH.")
        return (f"not consistent in-window ({where}): {len(self.violations)} violations, "
                f"{len(self.unmatched_zeros)} unmatched zeros, {len(self.unmatched_crossings)} unmatched crossings")

    def to_dict(self) -> dict:
        return _rounded({
            "window": self.window.as_dict(),
            "zeros": [{"t": z.t, "refined_tol": z.refined_tol, "simple": z.simple} for z in self.zeros],
            "green_noneyes_curves": self.green_noneyes_curves,
            "curves_with_one_crossing": self.curves_with_one_crossing,
            "eyes_curves": self.eyes_curves,
            "boundary_curves": self.boundary_curves,
            "violations": self.violations,
            "boundary_curves_with_one_crossing": self.boundary_curves_with_one_crossing,
            "crossings": self.crossings,
            "unmatched_zeros": self.unmatched_zeros,
            "unmatched_crossings": self.unmatched_crossings,
            "off_line_meetings": self.off_line_meetings,
            "bijection_ok": self.bijection_ok,
            "consistent": self.consistent,
            "summary": self.summary,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _rounded(obj):
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def _near_pole(p, radius: float) -> bool:
    z = complex(p[0], p[1])
    return any(abs(z - pole) <= radius for pole in POLES)


def topology_report(window: Window, resolution: tuple[int, int] | None = None,
                    cfg: EvalConfig = DEFAULT_CONFIG, threads: int | None = 0,
                    curves: CurveSet | None = None) -> TopologyReport:
    """Run field -> curves -> crossing audit on ``window``.

    For every NonEyes green curve: exactly one crossing of sigma = 1/2, and no
    meeting with a blue curve away from the critical line and the pole disks.
    Boundary curves are tallied but never violations. Every green crossing of
    the critical line must sit within two cell diagonals of a scanned zero, and
    every zero in the window must be hit exactly once.
    """
    if resolution is not None:
        window = window.with_size(*resolution)
    if curves is None:
        field = sample_phase_field(window, cfg, threads)
        curves = extract_curve_set(field)
    cell = window.cell_diagonal
    pole_reach = 2.0 * cfg.pole_radius + cell

    scan_reach = min(max(abs(window.t_min), abs(window.t_max)), MAX_SCAN_T)
    zeros = scan_zeros(scan_reach, 0.05, cfg, threads) if scan_reach >= 0.05 else []
    in_window = sorted(
        t for z in zeros for t in {z.t, -z.t}
        if window.t_min <= t <= window.t_max and window.sigma_min <= 0.5 <= window.sigma_max
    )

    noneyes = eyes = boundary = one = boundary_one = 0
    violations: list[dict] = []
    crossings: list[dict] = []
    off_line: list[dict] = []
    for gid, g in enumerate(curves.green):
        n_cross = count_critical_line_crossings(g)
        for _, t in critical_line_crossing_points(g):
            crossings.append({"curve": gid, "t": t})
        meetings = []
        for bid, b in enumerate(curves.blue):
            for p in curve_pair_intersections(g, b, cell):
                if abs(p[0] - 0.5) <= cell or _near_pole(p, pole_reach):
                    continue
                meetings.append({"curve": gid, "blue_curve": bid, "sigma": p[0], "t": p[1]})
        off_line += meetings
        cls = g.classification
        if cls is Classification.EYES:
            eyes += 1
        elif cls is Classification.BOUNDARY:
            boundary += 1
            boundary_one += n_cross == 1
        else:
            noneyes += 1
            one += n_cross == 1
            if n_cross != 1 or meetings:
                violations.append({
                    "curve": gid,
                    "crossing_count": n_cross,
                    "off_line_meetings": len(meetings),
                })

    tol = 2.0 * cell
    unmatched_cross = []
    hits = {t: 0 for t in in_window}
    for c in crossings:
        best = min(in_window, key=lambda z: abs(z - c["t"]), default=None)
        if best is None or abs(best - c["t"]) > tol:
            unmatched_cross.append([0.5, c["t"]])
        else:
            hits[best] += 1
            c["zero"] = best
    unmatched_zeros = [t for t, k in hits.items() if k != 1]

    return TopologyReport(
        window=window,
        zeros=[z for z in zeros if window.t_min <= z.t <= window.t_max or window.t_min <= -z.t <= window.t_max],
        green_noneyes_curves=noneyes,
        curves_with_one_crossing=one,
        eyes_curves=eyes,
        boundary_curves=boundary,
        violations=violations,
        boundary_curves_with_one_crossing=boundary_one,
        crossings=crossings,
        unmatched_zeros=unmatched_zeros,
        unmatched_crossings=unmatched_cross,
        off_line_meetings=off_line,
    )
