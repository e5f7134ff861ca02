"""Log-gamma, zeta and the completed zeta function Z(s) = pi^(-s/2) Gamma(s/2) zeta(s).

Everything here is double precision. Values of Z are carried in log form
(``LogComplex``) because |Z| underflows quickly away from the real axis.
The array entry points (``log_completed_zeta_array`` and friends) are what
the grid sampler uses; the scalar functions wrap them.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


class ZetaError(ValueError):
    """Base class for evaluation errors."""


class NonFinite(ZetaError):
    pass


class PoleOfGamma(ZetaError):
    pass


class PoleOfZeta(ZetaError):
    pass


class PoleOfZ(ZetaError):
    pass


class ZeroOfZ(ZetaError):
    pass


class DomainError(ZetaError):
    pass


@dataclass(frozen=True)
class LogComplex:
    """A nonzero complex number w stored as (ln|w|, arg w) with arg in (-pi, pi]."""

    log_modulus: float
    phase: float

    def __post_init__(self):
        if not math.isfinite(self.log_modulus):
            raise NonFinite(f"log_modulus must be finite, got {self.log_modulus}")
        if not (-math.pi < self.phase <= math.pi):
            raise ValueError(f"phase {self.phase} outside (-pi, pi]")

    def to_complex(self) -> complex:
        """Linear value; may underflow to 0 or overflow to inf."""
        return cmath.rect(math.exp(self.log_modulus), self.phase)


def default_series_terms(rel_tol: float) -> int:
    digits = -math.log10(rel_tol)
    return max(32, math.ceil(1.31 * digits))


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation settings.

    ``series_terms`` is the minimum depth of the accelerated eta series; the
    evaluator deepens it automatically for large |Im s| so that ``rel_tol``
    is met (the accelerated error grows like 1/|Gamma(s)|).
    """

    series_terms: int = 32
    rel_tol: float = 1e-15
    pole_radius: float = 0.05

    def __post_init__(self):
        if not (isinstance(self.series_terms, int) and self.series_terms >= 8):
            raise ValueError(f"series_terms must be an integer >= 8, got {self.series_terms!r}")
        if not (0.0 < self.rel_tol < 1.0):
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if not (self.pole_radius > 0.0 and math.isfinite(self.pole_radius)):
            raise ValueError(f"pole_radius must be positive, got {self.pole_radius!r}")


DEFAULT_CONFIG = EvalConfig()

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
LN2 = math.log(2.0)
_LOG_ACCEL = math.log(3.0 + math.sqrt(8.0))
# width of the pathological disks around 1 + 2 pi i k / ln 2
_DEGENERATE_DENOM = 1e-3
_RING_RADIUS = 1e-2
_RING_POINTS = 16

# Lanczos g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _as_complex(s) -> complex:
    z = complex(s)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NonFinite(f"non-finite argument {s!r}")
    return z


def normalize_phase(phase):
    """Map angles to (-pi, pi]. Works on floats and arrays; in-range values are untouched."""
    p = np.asarray(phase, dtype=float)
    p = p - 2.0 * np.pi * np.rint(p / (2.0 * np.pi))
    p = np.where(p <= -np.pi, p + 2.0 * np.pi, p)
    return p if p.ndim else float(p)


# ----------------------------------------------------------------- log-gamma


def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    # valid for Re z >= 1/2
    z = z - 1.0
    x = np.full(z.shape, _LANCZOS_COEF[0], dtype=complex)
    for i in range(1, len(_LANCZOS_COEF)):
        x = x + _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    """log sin(pi z) modulo 2 pi i, without overflow for large |Im z|."""
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z.imag) < 1.0
    out[small] = np.log(np.sin(np.pi * z[small]))
    big = ~small
    if np.any(big):
        zb = z[big]
        flip = zb.imag < 0
        zb = np.where(flip, np.conj(zb), zb)
        # sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i), |e^{2 i pi z}| < 1 here
        w = np.exp(2j * np.pi * zb)
        val = -1j * np.pi * zb + np.log(w - 1.0) - np.log(2j)
        out[big] = np.where(flip, np.conj(val), val)
    return out


def log_gamma_array(z) -> np.ndarray:
    """Complex log Gamma (some branch; reduce the imaginary part mod 2 pi yourself).

    Lanczos for Re z >= 1/2, reflection Gamma(z) Gamma(1-z) = pi / sin(pi z) below.
    Poles are not checked here.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    out[right] = _lanczos_log_gamma(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        out[left] = LOG_PI - _log_sin_pi(zl) - _lanczos_log_gamma(1.0 - zl)
    return out


def log_gamma(s) -> LogComplex:
    """log Gamma(s) as (ln|Gamma(s)|, arg Gamma(s))."""
    z = _as_complex(s)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleOfGamma(f"Gamma has a pole at {z.real:g}")
    nearest = round(z.real)
    if nearest <= 0 and abs(z - nearest) < DEFAULT_CONFIG.rel_tol * max(1.0, abs(nearest)):
        raise PoleOfGamma(f"Gamma has a pole at {nearest}")
    val = complex(log_gamma_array(np.array([z]))[0])
    return LogComplex(val.real, normalize_phase(val.imag))


# ----------------------------------------------------------------- zeta


@lru_cache(maxsize=None)
def borwein_weights(n: int) -> np.ndarray:
    """Weights w_k = 1 - d_k/d_n of Borwein's accelerated alternating series.

    eta(s) ~= sum_{k<n} (-1)^k w_k (k+1)^{-s}; computed exactly in rationals.
    """
    terms = []
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(
            math.factorial(n + i - 1) * 4**i,
            math.factorial(n - i) * math.factorial(2 * i),
        )
        terms.append(n * acc)
    d_n = terms[n]
    w = np.array([float(1 - d_k / d_n) for d_k in terms[:n]])
    w.flags.writeable = False
    return w


def _terms_needed(s: np.ndarray, rel_tol: float, floor: int) -> np.ndarray:
    """Series depth from the bound |err| <= 2 (3+sqrt 8)^-n / (|Gamma(s)| |1 - 2^(1-s)|)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.nan_to_num(log_gamma_array(s).real, nan=0.0, posinf=0.0, neginf=0.0)
    denom = np.abs(1.0 - np.exp((1.0 - s) * LN2))
    denom = np.maximum(denom, _RING_RADIUS * LN2 / 2)
    need = (math.log(2.0 / rel_tol) - lg - np.log(denom)) / _LOG_ACCEL
    n = np.maximum(np.ceil(need), floor).astype(int)
    # round up to a multiple of 4 so nearby points share one weight table
    return (n + 3) // 4 * 4


def _eta_fixed_depth(s: np.ndarray, n: int) -> np.ndarray:
    w = borwein_weights(n)
    sig = s.real
    t = s.imag
    re = np.zeros(s.shape)
    im = np.zeros(s.shape)
    for k in range(n):
        lk = math.log(k + 1.0)
        mag = w[k] * np.exp(-sig * lk)
        if k % 2:
            mag = -mag
        ang = t * lk
        re += mag * np.cos(ang)
        im -= mag * np.sin(ang)
    return re + 1j * im


def eta_array(s, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Dirichlet eta via Borwein's accelerated series, for Re s > 0."""
    s = np.asarray(s, dtype=complex)
    out = np.empty(s.shape, dtype=complex)
    depth = _terms_needed(s, cfg.rel_tol, cfg.series_terms)
    for n in np.unique(depth):
        sel = depth == n
        out[sel] = _eta_fixed_depth(s[sel], int(n))
    return out


def _zeta_from_eta(s: np.ndarray, cfg: EvalConfig) -> np.ndarray:
    denom = 1.0 - np.exp((1.0 - s) * LN2)
    return eta_array(s, cfg) / denom


def zeta_array(s, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """zeta(s) for Re s > 0, s != 1 (no pole check).

    Inside the small disks where 1 - 2^(1-s) vanishes (s = 1 + 2 pi i k / ln 2,
    k != 0) zeta is recovered from a ring of samples around the degenerate point
    by its Taylor series (trapezoidal Cauchy integrals).
    """
    s = np.asarray(s, dtype=complex)
    out = _zeta_from_eta(s, cfg)
    k = np.rint(s.imag * LN2 / (2.0 * np.pi))
    centers = 1.0 + 2j * np.pi * k / LN2
    bad = (k != 0) & (np.abs(1.0 - np.exp((1.0 - s) * LN2)) < _DEGENERATE_DENOM)
    for idx in zip(*np.nonzero(bad)):
        out[idx] = _zeta_by_ring(complex(s[idx]), complex(centers[idx]), cfg)
    return out


def _zeta_by_ring(s: complex, center: complex, cfg: EvalConfig) -> complex:
    m = _RING_POINTS
    theta = 2.0 * np.pi * np.arange(m) / m
    ring = center + _RING_RADIUS * np.exp(1j * theta)
    vals = _zeta_from_eta(ring, cfg)
    coef = np.fft.fft(vals) / m  # a_j r^j
    u = (s - center) / _RING_RADIUS
    return complex(np.polyval(coef[::-1], u))


def zeta_right(s, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """zeta(s) on the half plane Re s >= 1/2."""
    z = _as_complex(s)
    if z.real < 0.5:
        raise DomainError(f"zeta_right needs Re s >= 1/2, got {z}")
    if abs(z - 1.0) < cfg.pole_radius:
        raise PoleOfZeta(f"{z} lies within {cfg.pole_radius} of the pole at s = 1")
    return complex(zeta_array(np.array([z]), cfg)[0])


# ----------------------------------------------------------------- completed zeta


def log_completed_zeta_array(s, cfg: EvalConfig = DEFAULT_CONFIG):
    """Vectorised log Z.

    Returns ``(log_modulus, phase, ok)``; ``ok`` is False at points within
    ``cfg.pole_radius`` of 0 or 1, where zeta came out exactly zero, or where
    anything turned non-finite. Values at those points are NaN.
    """
    s = np.asarray(s, dtype=complex)
    finite = np.isfinite(s.real) & np.isfinite(s.imag)
    ok = finite & (np.abs(s) >= cfg.pole_radius) & (np.abs(s - 1.0) >= cfg.pole_radius)
    # Z(s) = Z(1 - s): only ever evaluate on Re s >= 1/2
    w = np.where(s.real < 0.5, 1.0 - s, s)
    w = np.where(ok, w, 2.0)
    zeta = zeta_array(w, cfg)
    with np.errstate(divide="ignore", invalid="ignore"):
        logz = -0.5 * w * LOG_PI + log_gamma_array(0.5 * w) + np.log(zeta)
    ok &= np.isfinite(logz.real) & np.isfinite(logz.imag)
    log_mod = np.where(ok, logz.real, np.nan)
    phase = np.where(ok, normalize_phase(np.where(ok, logz.imag, 0.0)), np.nan)
    return log_mod, phase, ok


def _check_poles(z: complex, cfg: EvalConfig) -> None:
    if abs(z) < cfg.pole_radius:
        raise PoleOfZ(f"{z} lies within {cfg.pole_radius} of the pole at s = 0")
    if abs(z - 1.0) < cfg.pole_radius:
        raise PoleOfZ(f"{z} lies within {cfg.pole_radius} of the pole at s = 1")


def log_completed_zeta(s, cfg: EvalConfig = DEFAULT_CONFIG) -> LogComplex:
    z = _as_complex(s)
    _check_poles(z, cfg)
    log_mod, phase, ok = log_completed_zeta_array(np.array([z]), cfg)
    if not ok[0]:
        raise ZeroOfZ(f"Z({z}) evaluated to zero")
    return LogComplex(float(log_mod[0]), float(phase[0]))


def completed_zeta(s, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Z(s) in linear form. Underflows to 0 for large |Im s|; use the log form for signs."""
    z = _as_complex(s)
    _check_poles(z, cfg)
    log_mod, phase, ok = log_completed_zeta_array(np.array([z]), cfg)
    if not ok[0]:
        return 0j
    return cmath.rect(math.exp(log_mod[0]), phase[0])


def log_gamma_factor(s: complex) -> complex | None:
    """log(pi^(-s/2) Gamma(s/2)); None at the poles s = 0, -2, -4, ..."""
    half = s / 2
    if half.imag == 0 and half.real <= 0 and half.real == math.floor(half.real):
        return None
    return complex(-0.5 * s * LOG_PI + log_gamma_array(np.array([half]))[0])


def zeta(s, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """zeta(s) on all of C minus {1}.

    Right of the critical line this is ``zeta_right``; left of it zeta is read
    off Z(s) = Z(1 - s) by dividing out pi^(-s/2) Gamma(s/2). Close to s = 0,
    where Z has its pole, the eta series is used directly.
    """
    z = _as_complex(s)
    if abs(z - 1.0) < cfg.pole_radius:
        raise PoleOfZeta(f"{z} lies within {cfg.pole_radius} of the pole at s = 1")
    if z.real >= 0.5:
        return zeta_right(z, cfg)
    if abs(z) < cfg.pole_radius:
        return complex(_zeta_from_eta(np.array([z]), cfg)[0])
    g = log_gamma_factor(z)
    if g is None:
        return 0j  # trivial zeros
    lz = log_completed_zeta(z, cfg)
    return cmath.exp(complex(lz.log_modulus, lz.phase) - g)


# ----------------------------------------------------------------- oracles


def zeta_series_oracle(s, n_terms: int) -> complex:
    """Partial sum of the Dirichlet series, sum_{n <= N} n^{-s}. Test oracle only."""
    z = _as_complex(s)
    if z.real <= 1.0:
        raise DomainError(f"Dirichlet series diverges for Re s <= 1 (s = {z})")
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    total = 0j
    chunk = 1 << 18
    for start in range(1, n_terms + 1, chunk):
        n = np.arange(start, min(start + chunk, n_terms + 1), dtype=float)
        # smallest terms first
        total += complex(np.sum(np.exp(-z * np.log(n))[::-1]))
    return total


def primes_upto(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def euler_product_oracle(s, prime_bound: int) -> complex:
    """Truncated Euler product prod_{p <= P} (1 - p^{-s})^{-1}. Test oracle only."""
    z = _as_complex(s)
    if z.real <= 1.0:
        raise DomainError(f"Euler product diverges for Re s <= 1 (s = {z})")
    if prime_bound < 2:
        raise ValueError("prime_bound must be >= 2")
    p = primes_upto(prime_bound).astype(float)
    # sum of logs avoids a long product of factors near 1
    return complex(np.exp(-np.sum(np.log1p(-np.exp(-z * np.log(p)))[::-1])))
