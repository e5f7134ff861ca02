import csv
import io
import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetacurves.contour import Classification
from zetacurves.field import Window
from zetacurves.verify import (
    RealityViolation,
    TopologyReport,
    ZeroRecord,
    hardy_real,
    hardy_real_array,
    hardy_z,
    scan_zeros,
    topology_report,
    zero_count_estimate,
    zeros_to_csv,
)
from zetacurves.zfn import DomainError, completed_zeta

# ordinates from an independent mpmath root-finder, frozen
KNOWN_ZEROS = [14.134725141734694, 21.022039638771555, 25.01085758014569]


@pytest.fixture(scope="module")
def zeros50():
    return scan_zeros(50, 0.05)


def mp_hardy(t):
    mpmath.mp.dps = 30
    s = mpmath.mpf(0.5) + 1j * mpmath.mpf(t)
    return complex(mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s))


def test_hardy_real_small_t():
    v = hardy_real(0.5)
    ref = mp_hardy(0.5)
    assert abs(ref.imag) < 1e-25
    assert math.isfinite(v) and v < 0
    assert abs(v - ref.real) <= 1e-13 * abs(ref.real)


@pytest.mark.parametrize("t", [3.0, 14.0, 30.5, 77.7, 99.9])
def test_hardy_real_matches_mpmath(t):
    ref = mp_hardy(t).real
    assert abs(hardy_real(t) - ref) <= 1e-12 * abs(ref)


def test_hardy_real_vanishes_at_first_zero():
    assert abs(hardy_real(14.134725)) < 1e-6 * abs(hardy_real(14.0))


def test_hardy_real_conjugate_path():
    for t in (0.5, 14.0, 40.0):
        below = completed_zeta(complex(0.5, -t))
        assert below.real == pytest.approx(hardy_real(t), rel=1e-13)
        assert abs(below.imag) <= 1e-6 * abs(below)


def test_hardy_real_rejects_negative():
    with pytest.raises(DomainError):
        hardy_real(-1.0)


def test_hardy_z_shares_signs():
    t = np.linspace(0.5, 60, 400)
    assert np.array_equal(np.sign(hardy_z(t)), np.sign(hardy_real_array(t)))


def test_reality_gate_never_trips_up_to_100():
    t = np.arange(0.0, 100.0001, 0.01)
    hardy_real_array(t)  # raises on failure


def test_reality_gate_fires_on_bad_phase(monkeypatch):
    from zetacurves import verify

    real = verify._critical_line

    def skewed(t, cfg):
        s, m, ph, ok = real(t, cfg)
        return s, m, ph + 0.1, ok

    monkeypatch.setattr(verify, "_critical_line", skewed)
    with pytest.raises(RealityViolation):
        hardy_real(5.0)


# ----------------------------------------------------------------- scan


def test_scan_below_first_zero_is_empty():
    assert scan_zeros(10) == []
    assert scan_zeros(10, 0.01) == []


def test_scan_first_zero():
    (z,) = scan_zeros(15)
    assert abs(z.t - KNOWN_ZEROS[0]) <= 1e-6
    assert z.simple and z.refined_tol <= 1e-8


def test_scan_to_fifty(zeros50):
    assert len(zeros50) == 10
    for z, ref in zip(zeros50, KNOWN_ZEROS):
        assert abs(z.t - ref) <= 1e-6
    assert all(z.simple for z in zeros50)
    assert [z.t for z in zeros50] == sorted(z.t for z in zeros50)


def test_scan_step_halving_stable(zeros50):
    half = scan_zeros(60, 0.025)
    full = scan_zeros(60, 0.05)
    assert len(half) == len(full)
    for a, b in zip(half, full):
        assert abs(a.t - b.t) <= 1e-6
    assert [z.t for z in full[:10]] == [z.t for z in zeros50]


def test_scan_threads_identical():
    assert scan_zeros(40, 0.05, threads=1) == scan_zeros(40, 0.05, threads=4)


@pytest.mark.parametrize("kw", [dict(t_max=50, step=0.0), dict(t_max=50, step=0.3), dict(t_max=150, step=0.05)])
def test_scan_argument_errors(kw):
    with pytest.raises(ValueError):
        scan_zeros(**kw)


def test_zero_record_invariants():
    with pytest.raises(ValueError):
        ZeroRecord(0.0, 1e-8, True)
    with pytest.raises(ValueError):
        ZeroRecord(14.0, 1e-5, True)


# ----------------------------------------------------------------- counting


def test_estimate_values():
    assert zero_count_estimate(50) == pytest.approx(9.4228, abs=1e-3)
    # formula value; 100/2pi * ln(100/2pi) - 100/2pi + 7/8
    x = 100 / (2 * math.pi)
    assert zero_count_estimate(100) == pytest.approx(x * math.log(x) - x + 0.875, rel=1e-15)
    assert zero_count_estimate(100) == pytest.approx(29.0023, abs=1e-3)


def test_estimate_domain():
    with pytest.raises(DomainError):
        zero_count_estimate(2 * math.pi * math.e)


@pytest.mark.parametrize("T", [50, 80, 100])
def test_count_near_estimate(T):
    assert abs(len(scan_zeros(T)) - zero_count_estimate(T)) <= 2


@given(st.floats(18.0, 100.0))
@settings(max_examples=10, deadline=None)
def test_count_near_estimate_property(T):
    assert abs(len(scan_zeros(T)) - zero_count_estimate(T)) <= 2


# ----------------------------------------------------------------- exports


def test_csv_export(zeros50):
    text = zeros_to_csv(zeros50)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["index", "t", "tol", "simple"]
    assert len(rows) == 11
    assert rows[1][0] == "1" and rows[1][3] == "true"
    assert float(rows[1][1]) == pytest.approx(zeros50[0].t, rel=1e-14)
    assert zeros_to_csv([]) == "index,t,tol,simple\n"


# ----------------------------------------------------------------- topology


@pytest.fixture(scope="module")
def strip_report():
    return topology_report(Window(-6, 7, 2, 50, 3, 3), (800, 450))


def test_topology_strip(strip_report):
    r = strip_report
    assert r.consistent
    assert r.violations == []
    assert r.curves_with_one_crossing == r.green_noneyes_curves
    assert len(r.zeros) == 10
    assert len(r.crossings) == 10
    assert sorted(c["zero"] for c in r.crossings) == pytest.approx([z.t for z in r.zeros], abs=1e-12)
    assert r.off_line_meetings == []
    assert r.summary.startswith("consistent with")
    assert "verified" not in r.summary


def test_zero_crossing_bijection_within_one_cell(strip_report):
    cell = strip_report.window.cell_diagonal
    for c in strip_report.crossings:
        assert abs(c["t"] - c["zero"]) <= cell


def test_topology_json(strip_report):
    data = json.loads(strip_report.to_json())
    for key in ("window", "zeros", "green_noneyes_curves", "curves_with_one_crossing",
                "eyes_curves", "boundary_curves", "violations"):
        assert key in data
    assert data["consistent"] is True
    assert strip_report.to_json() == strip_report.to_json()


def test_topology_eyes_window():
    r = topology_report(Window(-3, 4, -16, 16, 351, 321))
    assert r.eyes_curves == 2
    assert r.violations == []
    assert r.consistent
    assert len(r.crossings) == 2  # the eyes pass through the zeros at +-14.13


def test_topology_small_pole_window():
    r = topology_report(Window(-2, 3, -1.5, 1.5, 200, 120))
    assert r.violations == [] and r.consistent
    assert r.green_noneyes_curves == 0


def test_topology_right_of_two():
    r = topology_report(Window(2.1, 4, -1, 1, 60, 40))
    assert r.eyes_curves == r.boundary_curves == r.green_noneyes_curves == 0
    assert r.crossings == [] and r.zeros == []


def test_injected_violation_detected():
    from zetacurves.contour import Color, Curve, CurveSet

    w = Window(-1, 2, 10, 18, 100, 80)
    wiggle = Curve(Color.GREEN, [[0.3, 12], [0.7, 12.5], [0.3, 13], [0.6, 13.5]], window=w)
    assert wiggle.classification is Classification.NON_EYES
    r = topology_report(w, curves=CurveSet(w, [], [wiggle]))
    assert not r.consistent
    assert r.violations == [{"curve": 0, "crossing_count": 3, "off_line_meetings": 0}]
    assert r.summary.startswith("not consistent")
