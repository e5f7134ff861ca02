import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp
from scipy.spatial import cKDTree

from zetacurves import contour
from zetacurves.contour import (
    Classification,
    Color,
    Curve,
    CurveSet,
    EmptyField,
    SelfComparison,
    WrongColor,
    classify_green_curve,
    count_critical_line_crossings,
    critical_line_crossing_points,
    curve_pair_intersections,
    extract_curve_set,
    extract_level_curves,
)
from zetacurves.field import PhaseField, Window, sample_phase_field
from zetacurves.verify import scan_zeros

FIRST_ZERO = 14.134725141734693


@pytest.fixture(scope="module")
def zeros_60():
    return [z.t for z in scan_zeros(60, 0.05)]


def synthetic(phase, valid=None, window=None):
    phase = np.asarray(phase, dtype=float)
    ny, nx = phase.shape
    # unit square well away from the poles
    window = window or Window(5.0, 6.0, 30.0, 31.0, nx, ny)
    valid = np.ones(phase.shape, dtype=bool) if valid is None else np.asarray(valid)
    return PhaseField(window, np.where(valid, phase, np.nan), valid)


UP, DOWN = math.pi / 2, -math.pi / 2  # sin = +1 / -1


# ----------------------------------------------------------------- marching squares basics


def test_two_by_two_horizontal_split():
    # rows are sigma: sigma_min row positive, sigma_max row negative
    f = synthetic([[UP, UP], [DOWN, DOWN]])
    curves = extract_level_curves(f, Color.BLUE)
    assert len(curves) == 1
    c = curves[0]
    assert len(c.points) == 2
    # crosses the cell from the t_min edge to the t_max edge at mid sigma
    assert sorted(c.points[:, 1].tolist()) == [30.0, 31.0]
    assert np.allclose(c.points[:, 0], 5.5)
    assert c.classification is Classification.BOUNDARY


def test_uniform_sign_gives_nothing():
    assert extract_level_curves(synthetic([[UP, UP], [UP, UP]]), Color.BLUE) == []


def test_empty_field_raises():
    f = synthetic([[UP, UP], [DOWN, DOWN]], valid=[[True, False], [True, True]])
    with pytest.raises(EmptyField):
        extract_level_curves(f, Color.BLUE)


def test_linear_interpolation_position():
    # sin values 0.25 and -0.75 along t: crossing a quarter of the way
    a, b = math.asin(0.25), math.asin(-0.75)
    f = synthetic([[a, b], [a, b]])
    (c,) = extract_level_curves(f, Color.BLUE)
    assert np.allclose(c.points[:, 1], 30.25)


@pytest.mark.parametrize("centre_sign, expect_pairs", [(+1.0, "cut_1_3"), (-1.0, "cut_0_2")])
def test_saddle_resolved_by_centre_value(monkeypatch, centre_sign, expect_pairs):
    # corners 0 and 2 positive (case 5)
    f = synthetic([[UP, DOWN], [DOWN, UP]])
    monkeypatch.setattr(contour, "_centre_level", lambda *a, **k: np.array([centre_sign]))
    curves = extract_level_curves(f, Color.BLUE)
    assert len(curves) == 2
    corners = {(5.0, 30.0): 0, (5.0, 31.0): 1, (6.0, 31.0): 2, (6.0, 30.0): 3}
    cut = set()
    for c in curves:
        mid = c.points.mean(axis=0)
        nearest = min(corners, key=lambda k: math.dist(k, mid))
        cut.add(corners[nearest])
    assert cut == ({1, 3} if expect_pairs == "cut_1_3" else {0, 2})


def test_saddle_uses_real_centre_evaluation():
    # a real saddle: blue curves cross at s = 1/2 (real axis meets critical line)
    w = Window(0.3, 0.7, -0.2, 0.2, 6, 6)
    f = sample_phase_field(w)
    curves = extract_level_curves(f, Color.BLUE)
    assert curves
    for c in curves:
        assert c.classification is Classification.BOUNDARY


# ----------------------------------------------------------------- real fields


def test_real_segment_gives_single_blue_line():
    f = sample_phase_field(Window(1.2, 3, -1, 1, 41, 37))
    blue = extract_level_curves(f, Color.BLUE)
    assert len(blue) == 1
    assert np.all(blue[0].points[:, 1] == 0.0)
    # green arcs around the pole at s = 1 still reach into this window
    for c in extract_level_curves(f, Color.GREEN):
        assert c.points[:, 0].max() < 2.0


def test_green_curve_through_first_zero():
    w = Window(-4, 5, 2, 18, 181, 161)
    f = sample_phase_field(w)
    green = extract_level_curves(f, Color.GREEN)
    cell = w.cell_diagonal
    best = min(
        np.min(np.hypot(c.points[:, 0] - 0.5, c.points[:, 1] - FIRST_ZERO)) for c in green
    )
    assert best <= cell


def test_eyes_boundary_then_eyes_on_enlarging_windows():
    small = sample_phase_field(Window(-1, 2, 10, 18, 120, 90))
    curve = next(c for c in extract_level_curves(small, Color.GREEN) if count_critical_line_crossings(c) == 1)
    assert classify_green_curve(curve, 0.05) is Classification.BOUNDARY
    big = sample_phase_field(Window(-6, 7, -20, 20, 401, 261))
    through_zero = [
        c for c in extract_level_curves(big, Color.GREEN)
        if any(abs(t - FIRST_ZERO) < 0.3 for _, t in critical_line_crossing_points(c))
    ]
    assert len(through_zero) == 1
    assert through_zero[0].classification is Classification.EYES
    assert count_critical_line_crossings(through_zero[0]) == 1


def test_no_green_right_of_two():
    f = sample_phase_field(Window(2.2, 4, -1, 1, 30, 30))
    assert extract_level_curves(f, Color.GREEN) == []


def _adjacent_to_mask(p, field: PhaseField) -> bool:
    w = field.window
    z = complex(*p)
    if min(abs(z), abs(z - 1)) <= field.cfg.pole_radius + w.cell_diagonal:
        return True
    r = (p[0] - w.sigma_min) / w.d_sigma
    c = (p[1] - w.t_min) / w.d_t
    r0, c0 = int(math.floor(r)), int(math.floor(c))
    rows = range(max(r0 - 1, 0), min(r0 + 3, w.ny))
    cols = range(max(c0 - 1, 0), min(c0 + 3, w.nx))
    return not field.valid[np.ix_(list(rows), list(cols))].all()


def test_endpoints_on_boundary_or_mask():
    w = Window(-3, 4, -18, 18, 241, 141)
    f = sample_phase_field(w)
    for color in Color:
        for c in extract_level_curves(f, color):
            if c.closed:
                continue
            for p in c.endpoints:
                assert contour._on_boundary(p, w) or _adjacent_to_mask(p, f), (color, p)


def test_conjugation_symmetry_of_curve_set():
    w = Window(-4, 5, -25, 25, 201, 121)
    f = sample_phase_field(w)
    cs = extract_curve_set(f)
    for group in (cs.blue, cs.green):
        pts = np.concatenate([c.points for c in group])
        tree = cKDTree(pts)
        mirrored = pts * np.array([1.0, -1.0])
        dist, _ = tree.query(mirrored)
        assert dist.max() <= w.cell_diagonal


def test_crossing_counts_stable_under_doubling():
    def counts(nx, ny):
        f = sample_phase_field(Window(-6, 7, 2, 50, nx, ny))
        green = extract_level_curves(f, Color.GREEN)
        out = []
        for c in green:
            pts = critical_line_crossing_points(c)
            key = round(pts[0][1]) if pts else round(float(c.points[:, 1].mean()))
            out.append((key, count_critical_line_crossings(c)))
        return sorted(out)

    coarse = counts(400, 225)
    fine = counts(800, 450)
    assert [k for _, k in coarse] == [k for _, k in fine]
    assert len(coarse) == len(fine)


def test_blue_green_meet_only_at_zeros_or_poles(zeros_60):
    w = Window(-6, 7, -30, 30, 521, 301)
    cs = extract_curve_set(sample_phase_field(w))
    cell = w.cell_diagonal
    zs = [complex(0.5, t) for t in zeros_60 if t <= 30] + [complex(0.5, -t) for t in zeros_60 if t <= 30]
    met = 0
    for g in cs.green:
        for b in cs.blue:
            for s, t in curve_pair_intersections(g, b):
                p = complex(s, t)
                near_zero = any(abs(p - z) <= 2 * cell for z in zs)
                near_pole = min(abs(p), abs(p - 1)) <= 2 * 0.05 + cell
                assert near_zero or near_pole, p
                met += 1
    assert met >= len(zs)


# ----------------------------------------------------------------- classification


def test_classify_eyes():
    c = Curve(Color.GREEN, [[0.04, 0.03], [0.5, 2.0], [0.96, -0.02]])
    assert classify_green_curve(c, 0.05) is Classification.EYES


def test_classify_lobe_on_one_pole():
    c = Curve(Color.GREEN, [[0.04, 0.03], [0.5, 2.0], [0.02, -0.05]])
    assert classify_green_curve(c, 0.05) is Classification.EYES


def test_classify_boundary():
    w = Window(-2, 3, 0, 5, 10, 10)
    c = Curve(Color.GREEN, [[0.04, 0.03], [0.5, 5.0]], window=w)
    assert classify_green_curve(c, 0.05) is Classification.BOUNDARY
    assert classify_green_curve(Curve(Color.GREEN, [[0.5, 1], [0.7, 5.0]]), 0.05, window=w) is Classification.BOUNDARY


def test_classify_closed_and_interior():
    w = Window(-2, 3, 0, 5, 10, 10)
    loop = Curve(Color.GREEN, [[0, 1], [1, 1], [1, 2], [0, 1]], closed=True, window=w)
    assert classify_green_curve(loop, 0.05) is Classification.NON_EYES
    open_ = Curve(Color.GREEN, [[0.3, 1], [0.8, 2]], window=w)
    assert classify_green_curve(open_, 0.05) is Classification.NON_EYES


def test_classify_rejects_blue():
    with pytest.raises(WrongColor):
        classify_green_curve(Curve(Color.BLUE, [[0, 1], [1, 1]]), 0.05)


def test_eyes_only_for_green():
    with pytest.raises(ValueError):
        Curve(Color.BLUE, [[0, 1], [1, 1]], classification=Classification.EYES)


# ----------------------------------------------------------------- crossings


def test_crossing_count_examples():
    assert count_critical_line_crossings(Curve(Color.GREEN, [[0.7, 0], [0.9, 1], [0.61, 2]])) == 0
    assert count_critical_line_crossings(Curve(Color.GREEN, [[0.4, 14.0], [0.6, 14.2]])) == 1


def test_crossing_count_on_line_vertices():
    # runs of vertices exactly on sigma = 1/2 collapse to one
    c = Curve(Color.GREEN, [[0.4, 0], [0.5, 1], [0.5, 2], [0.6, 3]])
    assert count_critical_line_crossings(c) == 1
    assert critical_line_crossing_points(c) == [(0.5, 1.0)]
    c2 = Curve(Color.GREEN, [[0.5, 0], [0.6, 1], [0.4, 2], [0.5, 3]])
    assert count_critical_line_crossings(c2) == 3


def test_crossing_count_closed_loop():
    loop = Curve(Color.GREEN, [[0.4, 0], [0.6, 0], [0.6, 1], [0.4, 1], [0.4, 0]], closed=True)
    assert count_critical_line_crossings(loop) == 2
    assert len(critical_line_crossing_points(loop)) == 2


@given(hnp.arrays(float, st.tuples(st.integers(2, 30), st.just(2)), elements=st.floats(-3, 3)))
def test_crossing_points_match_count(pts):
    c = Curve(Color.GREEN, pts)
    assert len(critical_line_crossing_points(c)) == count_critical_line_crossings(c)


def test_pair_intersections_disjoint():
    a = Curve(Color.GREEN, [[-2, 0], [-1, 1], [-2, 2]])
    b = Curve(Color.BLUE, [[2, 0], [1, 1], [2, 2]])
    assert curve_pair_intersections(a, b, 0.1) == []


def test_pair_intersections_single_crossing():
    a = Curve(Color.GREEN, [[0, 0], [1, 1], [2, 2]])
    b = Curve(Color.BLUE, [[0, 2], [1, 1.5], [1.5, 1.2], [2, 0]])
    pts = curve_pair_intersections(a, b, 0.05)
    assert len(pts) == 1
    s, t = pts[0]
    assert abs(s - t) < 1e-12


def test_pair_intersections_dedup():
    # dense polylines crossing once: many segment pairs close, one reported point
    x = np.linspace(-1, 1, 201)
    a = Curve(Color.GREEN, np.stack([x, x], 1))
    b = Curve(Color.BLUE, np.stack([x, -x], 1))
    pts = curve_pair_intersections(a, b, 0.05)
    assert len(pts) == 1
    assert np.allclose(pts[0], (0, 0), atol=1e-12)


def test_pair_intersections_self_rejected():
    a = Curve(Color.GREEN, [[0, 0], [1, 1]])
    with pytest.raises(SelfComparison):
        curve_pair_intersections(a, a, 0.1)


def test_green_meets_critical_line_near_first_zero():
    w = Window(-1, 2, 10, 18, 300, 160)
    cs = extract_curve_set(sample_phase_field(w))
    hits = []
    for g in cs.green:
        for b in cs.blue:
            for s, t in curve_pair_intersections(g, b):
                if abs(s - 0.5) <= w.cell_diagonal:
                    hits.append((s, t))
    assert len(hits) == 1
    s, t = hits[0]
    assert math.hypot(s - 0.5, t - FIRST_ZERO) <= 2 * w.cell_diagonal


# ----------------------------------------------------------------- serialisation


def test_curve_set_json_round_trip():
    w = Window(-2, 3, -16, 16, 120, 90)
    cs = extract_curve_set(sample_phase_field(w))
    text = cs.to_json()
    data = json.loads(text)
    assert set(data) == {"window", "curves"}
    assert set(data["curves"][0]) == {"color", "classification", "closed", "points"}
    back = CurveSet.from_json(text)
    assert back.window == w
    assert len(back.blue) == len(cs.blue) and len(back.green) == len(cs.green)
    for a, b in zip(cs.curves, back.curves):
        assert np.array_equal(a.points, b.points)
        assert a.classification is b.classification


# ----------------------------------------------------------------- structural property


@given(
    hnp.arrays(float, st.tuples(st.integers(2, 9), st.integers(2, 9)), elements=st.floats(-3.1, 3.1)),
    st.data(),
)
@settings(max_examples=80, deadline=None)
def test_linking_uses_every_segment_once(phase, data):
    mask = data.draw(hnp.arrays(bool, phase.shape, elements=st.booleans()))
    mask[0, 0] = mask[0, 1] = mask[1, 0] = mask[1, 1] = True
    f = synthetic(phase, valid=mask)
    for color in Color:
        seg_a, seg_b, _ = contour._marching_segments(f, color)
        curves = extract_level_curves(f, color)
        assert sum(len(c.points) - 1 for c in curves) == len(seg_a)
        for c in curves:
            if not c.closed:
                for p in c.endpoints:
                    assert contour._on_boundary(p, f.window) or _adjacent_to_mask(p, f)
            else:
                assert np.array_equal(c.points[0], c.points[-1])
