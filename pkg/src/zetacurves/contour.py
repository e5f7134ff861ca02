"""Level curves Im Z = 0 (blue) and Re Z = 0 (green) from a sampled phase field.

Marching squares runs on g = sin(arg Z) for blue and g = cos(arg Z) for green.
Samples with g >= 0 count as positive. Saddle cells are resolved by evaluating
Z at the cell centre. Curves are polylines in (sigma, t) coordinates.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

from .field import PhaseField, Window
from .zfn import log_completed_zeta_array


class Color(str, Enum):
    BLUE = "blue"
    GREEN = "green"


class Classification(str, Enum):
    EYES = "eyes"
    NON_EYES = "non-eyes"
    BOUNDARY = "boundary"


class EmptyField(ValueError):
    pass


class WrongColor(ValueError):
    pass


class SelfComparison(ValueError):
    pass


CRITICAL_SIGMA = 0.5
POLES = (0j, 1 + 0j)


@dataclass(eq=False)
class Curve:
    color: Color
    points: np.ndarray  # (n, 2) of (sigma, t); closed curves repeat the first point at the end
    closed: bool = False
    classification: Classification = Classification.NON_EYES
    window: Window | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        self.color = Color(self.color)
        self.classification = Classification(self.classification)
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(self.points) < 2:
            raise ValueError("a curve needs at least two points")
        if self.classification is Classification.EYES and self.color is not Color.GREEN:
            raise ValueError("only green curves can be classified as eyes")

    @property
    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points[0], self.points[-1]

    @property
    def segments(self) -> np.ndarray:
        """(n-1, 2, 2) array of consecutive point pairs."""
        return np.stack([self.points[:-1], self.points[1:]], axis=1)

    def to_dict(self) -> dict:
        return {
            "color": self.color.value,
            "classification": self.classification.value,
            "closed": self.closed,
            "points": [[float(s), float(t)] for s, t in self.points],
        }


@dataclass(eq=False)
class CurveSet:
    window: Window
    blue: list[Curve]
    green: list[Curve]

    @property
    def curves(self) -> list[Curve]:
        return [*self.blue, *self.green]

    def to_dict(self) -> dict:
        return {"window": self.window.as_dict(), "curves": [c.to_dict() for c in self.curves]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "CurveSet":
        window = Window(**data["window"])
        blue, green = [], []
        for c in data["curves"]:
            curve = Curve(
                Color(c["color"]), np.array(c["points"], dtype=float), bool(c["closed"]),
                Classification(c["classification"]), window,
            )
            (blue if curve.color is Color.BLUE else green).append(curve)
        return cls(window, blue, green)

    @classmethod
    def from_json(cls, text: str) -> "CurveSet":
        return cls.from_dict(json.loads(text))


# ----------------------------------------------------------------- extraction


def level_function(phase: np.ndarray, color: Color) -> np.ndarray:
    return np.sin(phase) if Color(color) is Color.BLUE else np.cos(phase)


def _centre_level(field: PhaseField, rows: np.ndarray, cols: np.ndarray, color: Color) -> np.ndarray:
    w = field.window
    sig = w.sigmas
    ts = w.ts
    centres = 0.5 * (sig[rows] + sig[rows + 1]) + 0.5j * (ts[cols] + ts[cols + 1])
    _, ph, ok = log_completed_zeta_array(centres, field.cfg)
    g = level_function(ph, color)
    return np.where(ok, g, np.nan)


def _pole_cells(w: Window, radius: float) -> np.ndarray:
    """Cells whose rectangle meets a pole disk; skipped even when no sample
    falls inside the disk, otherwise a coarse grid would stitch curves
    straight through the pole."""
    s, t = w.sigmas, w.ts
    out = np.zeros((w.ny - 1, w.nx - 1), dtype=bool)
    for pole in POLES:
        ds = np.maximum(np.maximum(s[:-1] - pole.real, pole.real - s[1:]), 0.0)
        dt = np.maximum(np.maximum(t[:-1] - pole.imag, pole.imag - t[1:]), 0.0)
        out |= np.hypot(ds[:, None], dt[None, :]) <= radius
    return out


def _marching_segments(field: PhaseField, color: Color):
    """Return (edge_a, edge_b, crossing-point lookup) for every segment."""
    w = field.window
    ny, nx = w.ny, w.nx
    g = level_function(np.where(field.valid, field.phase, 0.0), color)
    pos = g >= 0
    valid = field.valid
    cell_ok = valid[:-1, :-1] & valid[:-1, 1:] & valid[1:, 1:] & valid[1:, :-1]
    cell_ok &= ~_pole_cells(w, field.cfg.pole_radius)
    if not cell_ok.any():
        raise EmptyField("no 2x2 block of valid samples")

    b0 = pos[:-1, :-1]
    b1 = pos[:-1, 1:]
    b2 = pos[1:, 1:]
    b3 = pos[1:, :-1]
    case = (b0.astype(np.uint8) | (b1 << 1) | (b2 << 2) | (b3 << 3)).astype(np.uint8)
    active = cell_ok & (case != 0) & (case != 15)
    rows, cols = np.nonzero(active)
    case = case[rows, cols]

    # edge ids: H(r,c) joins (r,c)-(r,c+1); V(r,c) joins (r,c)-(r+1,c)
    n_h = ny * nx
    e0 = rows * nx + cols
    e1 = n_h + rows * nx + cols + 1
    e2 = (rows + 1) * nx + cols
    e3 = n_h + rows * nx + cols
    edges = np.stack([e0, e1, e2, e3], axis=1)
    bits = np.stack([(case >> k) & 1 for k in range(4)], axis=1).astype(bool)
    crossed = bits != np.roll(bits, -1, axis=1)  # edge k joins corner k and k+1

    seg_a: list[np.ndarray] = []
    seg_b: list[np.ndarray] = []
    simple = crossed.sum(axis=1) == 2
    if simple.any():
        idx = np.nonzero(simple)[0]
        which = np.nonzero(crossed[idx])[1].reshape(-1, 2)
        seg_a.append(edges[idx, which[:, 0]])
        seg_b.append(edges[idx, which[:, 1]])
    saddle = ~simple
    if saddle.any():
        idx = np.nonzero(saddle)[0]
        gc = _centre_level(field, rows[idx], cols[idx], color)
        corner_mean = 0.25 * (
            g[rows[idx], cols[idx]] + g[rows[idx], cols[idx] + 1]
            + g[rows[idx] + 1, cols[idx] + 1] + g[rows[idx] + 1, cols[idx]]
        )
        gc = np.where(np.isnan(gc), corner_mean, gc)
        centre_pos = gc >= 0
        joins_02 = centre_pos == bits[idx, 0]
        # corner 0 and 2 share the centre region: cut off corners 1 and 3
        a1 = np.where(joins_02, edges[idx, 0], edges[idx, 3])
        b1_ = np.where(joins_02, edges[idx, 1], edges[idx, 0])
        a2 = np.where(joins_02, edges[idx, 2], edges[idx, 1])
        b2_ = np.where(joins_02, edges[idx, 3], edges[idx, 2])
        seg_a += [a1, a2]
        seg_b += [b1_, b2_]

    seg_a_all = np.concatenate(seg_a) if seg_a else np.empty(0, dtype=np.int64)
    seg_b_all = np.concatenate(seg_b) if seg_b else np.empty(0, dtype=np.int64)

    used = np.unique(np.concatenate([seg_a_all, seg_b_all]))
    pts = _edge_points(used, g, w)
    return seg_a_all, seg_b_all, dict(zip(used.tolist(), map(tuple, pts.tolist())))


def _edge_points(edge_ids: np.ndarray, g: np.ndarray, w: Window) -> np.ndarray:
    ny, nx = w.ny, w.nx
    sig = w.sigmas
    ts = w.ts
    is_v = edge_ids >= ny * nx
    local = np.where(is_v, edge_ids - ny * nx, edge_ids)
    r = local // nx
    c = local % nx
    r2 = np.where(is_v, r + 1, r)
    c2 = np.where(is_v, c, c + 1)
    ga = g[r, c]
    gb = g[r2, c2]
    frac = ga / (ga - gb)
    s_pt = sig[r] + frac * (sig[r2] - sig[r])
    t_pt = ts[c] + frac * (ts[c2] - ts[c])
    # exact boundary coordinates along boundary edges
    s_pt = np.where(is_v, s_pt, sig[r])
    t_pt = np.where(is_v, ts[c], t_pt)
    return np.stack([s_pt, t_pt], axis=1)


def _link(seg_a: np.ndarray, seg_b: np.ndarray) -> list[tuple[list[int], bool]]:
    """Chain segments sharing edge ids into maximal polylines."""
    by_edge: dict[int, list[int]] = defaultdict(list)
    a_list = seg_a.tolist()
    b_list = seg_b.tolist()
    for i, (a, b) in enumerate(zip(a_list, b_list)):
        by_edge[a].append(i)
        by_edge[b].append(i)
    used = bytearray(len(a_list))

    def follow(edge: int, seg: int) -> list[int]:
        chain = [edge]
        while seg is not None:
            used[seg] = 1
            a, b = a_list[seg], b_list[seg]
            edge = b if a == edge else a
            chain.append(edge)
            seg = next((k for k in by_edge[edge] if not used[k]), None)
        return chain

    chains = []
    # open chains start at degree-one edges; sorted for a deterministic order
    for edge in sorted(e for e, segs in by_edge.items() if len(segs) == 1):
        seg = by_edge[edge][0]
        if not used[seg]:
            chains.append((follow(edge, seg), False))
    for seg in range(len(a_list)):
        if not used[seg]:
            chain = follow(a_list[seg], seg)
            chains.append((chain, chain[0] == chain[-1]))
    return chains


def extract_level_curves(field: PhaseField, color: Color) -> list[Curve]:
    """Blue (Im Z = 0) or green (Re Z = 0) curves as linked polylines.

    Cells touching an invalid sample or a pole disk are skipped, so curves
    end next to a pole or at the window edge. Curves come back classified (see
    ``classify_green_curve``; blue curves are only ever Boundary or NonEyes).
    """
    color = Color(color)
    seg_a, seg_b, pts = _marching_segments(field, color)
    curves = []
    for chain, closed in _link(seg_a, seg_b):
        points = np.array([pts[e] for e in chain])
        curve = Curve(color, points, closed, Classification.NON_EYES, field.window)
        curves.append(curve)
    slack = field.window.cell_diagonal
    for c in curves:
        if color is Color.GREEN:
            c.classification = classify_green_curve(c, field.cfg.pole_radius, slack=slack)
        elif _touches_boundary(c, field.window):
            c.classification = Classification.BOUNDARY
    return curves


def extract_curve_set(field: PhaseField) -> CurveSet:
    return CurveSet(field.window, extract_level_curves(field, Color.BLUE), extract_level_curves(field, Color.GREEN))


# ----------------------------------------------------------------- classification


def _on_boundary(p: np.ndarray, w: Window) -> bool:
    eps_s = 1e-9 * max(1.0, w.sigma_max - w.sigma_min)
    eps_t = 1e-9 * max(1.0, w.t_max - w.t_min)
    s, t = p
    return (
        abs(s - w.sigma_min) <= eps_s or abs(s - w.sigma_max) <= eps_s
        or abs(t - w.t_min) <= eps_t or abs(t - w.t_max) <= eps_t
    )


def _touches_boundary(curve: Curve, w: Window | None) -> bool:
    if curve.closed or w is None:
        return False
    return any(_on_boundary(p, w) for p in curve.endpoints)


def _nearest_pole(p: np.ndarray, radius: float):
    z = complex(p[0], p[1])
    for pole in POLES:
        if abs(z - pole) <= radius:
            return pole
    return None


def classify_green_curve(curve: Curve, pole_radius: float, window: Window | None = None,
                         slack: float = 0.0) -> Classification:
    """Eyes, NonEyes or Boundary.

    Eyes: both ends within ``2 * pole_radius + slack`` of a pole (0 or 1).
    ``slack`` absorbs the grid quantisation of the pole mask; the extraction
    pipeline passes one cell diagonal. Boundary: an end lies on the window
    edge. Closed curves are NonEyes.
    """
    if Color(curve.color) is not Color.GREEN:
        raise WrongColor("classification applies to green curves only")
    if curve.closed:
        return Classification.NON_EYES
    reach = 2.0 * pole_radius + slack
    ends = [_nearest_pole(p, reach) for p in curve.endpoints]
    if all(e is not None for e in ends):
        return Classification.EYES
    if _touches_boundary(curve, window if window is not None else curve.window):
        return Classification.BOUNDARY
    return Classification.NON_EYES


def is_critical_line_curve(curve: Curve, window: Window, frac: float = 0.9) -> bool:
    """True for blue curves running along sigma = 1/2."""
    if curve.color is not Color.BLUE:
        return False
    near = np.abs(curve.points[:, 0] - CRITICAL_SIGMA) <= max(window.d_sigma, 1e-12)
    return bool(near.mean() >= frac)


# ----------------------------------------------------------------- crossings


def _cyclic_offsets(curve: Curve, sigma: float):
    """Vertex offsets from ``sigma``; closed curves drop their repeated end vertex."""
    pts = curve.points
    if curve.closed and len(pts) > 2 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    return pts, pts[:, 0] - sigma


def count_critical_line_crossings(curve: Curve, sigma: float = CRITICAL_SIGMA) -> int:
    """Segments strictly straddling sigma = 1/2, plus runs of vertices lying exactly on it."""
    _, d = _cyclic_offsets(curve, sigma)
    on = d == 0
    if curve.closed:
        straddle = np.count_nonzero(d * np.roll(d, -1) < 0)
        runs = 1 if on.all() else np.count_nonzero(on & ~np.roll(on, 1))
    else:
        straddle = np.count_nonzero(d[:-1] * d[1:] < 0)
        runs = int(on[0]) + np.count_nonzero(on[1:] & ~on[:-1])
    return int(straddle + runs)


def critical_line_crossing_points(curve: Curve, sigma: float = CRITICAL_SIGMA) -> list[tuple[float, float]]:
    """Where the curve meets sigma = 1/2, one point per counted crossing."""
    pts, d = _cyclic_offsets(curve, sigma)
    n = len(pts)
    last = n if curve.closed else n - 1
    on = d == 0
    out = []
    for i in range(n):
        has_prev = i > 0 or curve.closed
        run_start = on[i] and not (has_prev and on[i - 1])
        if run_start or (on.all() and i == 0):
            out.append((sigma, float(pts[i, 1])))
        if i < last:
            j = (i + 1) % n
            if d[i] * d[j] < 0:
                f = d[i] / (d[i] - d[j])
                out.append((sigma, float(pts[i, 1] + f * (pts[j, 1] - pts[i, 1]))))
    return out


def _point_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray):
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.einsum("ij,ij->i", p - a, ab) / denom
    u = np.clip(np.nan_to_num(u), 0.0, 1.0)
    q = a + u[:, None] * ab
    return np.hypot(*(p - q).T), q


def _segment_pairs_distance(p0, p1, q0, q1):
    """Minimum distance between segment pairs and the midpoint of the closest pair."""
    d1 = p1 - p0
    d2 = q1 - q0
    r = q0 - p0
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    with np.errstate(invalid="ignore", divide="ignore"):
        u = (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / cross
        v = (r[:, 0] * d1[:, 1] - r[:, 1] * d1[:, 0]) / cross
    hit = (cross != 0) & (u >= 0) & (u <= 1) & (v >= 0) & (v <= 1)

    cands = [
        _point_segment(p0, q0, q1) + (p0,),
        _point_segment(p1, q0, q1) + (p1,),
        _point_segment(q0, p0, p1) + (q0,),
        _point_segment(q1, p0, p1) + (q1,),
    ]
    dist = np.stack([c[0] for c in cands], axis=1)
    k = np.argmin(dist, axis=1)
    rows = np.arange(len(p0))
    foot = np.stack([c[1] for c in cands], axis=1)[rows, k]
    src = np.stack([c[2] for c in cands], axis=1)[rows, k]
    best = dist[rows, k]
    mid = 0.5 * (foot + src)
    inter = p0 + np.nan_to_num(u)[:, None] * d1
    best = np.where(hit, 0.0, best)
    mid = np.where(hit[:, None], inter, mid)
    return best, mid


def curve_pair_intersections(a: Curve, b: Curve, tol: float | None = None) -> list[tuple[float, float]]:
    """Points where curves ``a`` and ``b`` come within ``tol`` of each other.

    Near-passes are clustered (single linkage at ``tol``); each cluster is
    reported once, at its closest approach. ``tol`` defaults to one cell
    diagonal of the curves' window. Comparing a curve with itself raises
    ``SelfComparison``.
    """
    if a is b or (a.points.shape == b.points.shape and np.array_equal(a.points, b.points)):
        raise SelfComparison("self-intersection is not supported")
    if tol is None:
        w = a.window or b.window
        if w is None:
            raise ValueError("tol is required for curves without a window")
        tol = w.cell_diagonal
    sa = a.segments
    sb = b.segments
    if not len(sa) or not len(sb):
        return []
    len_a = np.hypot(*(sa[:, 1] - sa[:, 0]).T).max()
    len_b = np.hypot(*(sb[:, 1] - sb[:, 0]).T).max()
    ta = cKDTree(sa.mean(axis=1))
    tb = cKDTree(sb.mean(axis=1))
    pairs = ta.query_ball_tree(tb, r=tol + 0.5 * (len_a + len_b))
    ia = np.array([i for i, js in enumerate(pairs) for _ in js], dtype=np.int64)
    ib = np.array([j for js in pairs for j in js], dtype=np.int64)
    if not ia.size:
        return []
    dist, mid = _segment_pairs_distance(sa[ia, 0], sa[ia, 1], sb[ib, 0], sb[ib, 1])
    close = dist <= tol
    if not close.any():
        return []
    dist = dist[close]
    mid = mid[close]
    return _cluster(mid, dist, tol)


def _cluster(points: np.ndarray, dist: np.ndarray, tol: float) -> list[tuple[float, float]]:
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in cKDTree(points).query_pairs(tol):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    best: dict[int, int] = {}
    for i in range(len(points)):
        r = find(i)
        if r not in best or dist[i] < dist[best[r]]:
            best[r] = i
    out = [tuple(map(float, points[i])) for i in best.values()]
    return sorted(out, key=lambda p: (p[1], p[0]))
