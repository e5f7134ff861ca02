"""Sampling arg Z over a rectangular window.

Grid convention: ``phase[r, c]`` holds arg Z(sigma_r + i t_c), rows run along
sigma (``ny`` of them) and columns along t (``nx``). Both window edges are
sample points.
"""
from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .zfn import DEFAULT_CONFIG, EvalConfig, log_completed_zeta_array

# Rows per work unit. Fixed so the arithmetic done for a sample never depends on
# how many workers are running.
ROW_BLOCK = 8

MAGIC = b"ZPHF"
_HEADER = struct.Struct("<4sII4d")


@dataclass(frozen=True)
class Window:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float
    nx: int
    ny: int

    def __post_init__(self):
        vals = (self.sigma_min, self.sigma_max, self.t_min, self.t_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"window bounds must be finite: {vals}")
        if not (self.t_min < self.t_max):
            raise ValueError(f"need t_min < t_max, got {self.t_min}, {self.t_max}")
        if self.nx < 2:
            raise ValueError(f"nx must be >= 2, got {self.nx}")
        # a single sigma row is allowed as a degenerate line window
        if self.sigma_min == self.sigma_max:
            if self.ny != 1:
                raise ValueError("a window with sigma_min == sigma_max must have ny == 1")
        elif not (self.sigma_min < self.sigma_max):
            raise ValueError(f"need sigma_min < sigma_max, got {self.sigma_min}, {self.sigma_max}")
        elif self.ny < 2:
            raise ValueError(f"ny must be >= 2, got {self.ny}")

    @property
    def sigmas(self) -> np.ndarray:
        if self.ny == 1:
            return np.array([float(self.sigma_min)])
        return np.linspace(self.sigma_min, self.sigma_max, self.ny)

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.nx)

    @property
    def d_sigma(self) -> float:
        return (self.sigma_max - self.sigma_min) / (self.ny - 1) if self.ny > 1 else 0.0

    @property
    def d_t(self) -> float:
        return (self.t_max - self.t_min) / (self.nx - 1)

    @property
    def cell_diagonal(self) -> float:
        return math.hypot(self.d_sigma, self.d_t)

    def with_size(self, nx: int, ny: int) -> "Window":
        return Window(self.sigma_min, self.sigma_max, self.t_min, self.t_max, nx, ny)

    def contains(self, sigma: float, t: float) -> bool:
        return self.sigma_min <= sigma <= self.sigma_max and self.t_min <= t <= self.t_max

    def as_dict(self) -> dict:
        return {
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
            "t_min": self.t_min,
            "t_max": self.t_max,
            "nx": self.nx,
            "ny": self.ny,
        }


@dataclass(frozen=True, eq=False)
class PhaseField:
    window: Window
    phase: np.ndarray  # (ny, nx) float64, NaN where invalid
    valid: np.ndarray  # (ny, nx) bool
    cfg: EvalConfig = DEFAULT_CONFIG  # used for extra evaluations (saddle cells)

    def __post_init__(self):
        shape = (self.window.ny, self.window.nx)
        if self.phase.shape != shape or self.valid.shape != shape:
            raise ValueError(f"arrays must have shape {shape}")
        self.phase.flags.writeable = False
        self.valid.flags.writeable = False

    def points(self) -> np.ndarray:
        return self.window.sigmas[:, None] + 1j * self.window.ts[None, :]

    def to_bytes(self) -> bytes:
        w = self.window
        head = _HEADER.pack(MAGIC, w.nx, w.ny, w.sigma_min, w.sigma_max, w.t_min, w.t_max)
        phase = np.where(self.valid, self.phase, 0.0).astype("<f8")
        return head + phase.tobytes() + self.valid.astype(np.uint8).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "PhaseField":
        if len(data) < _HEADER.size:
            raise ValueError("truncated phase-field header")
        magic, nx, ny, smin, smax, tmin, tmax = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        n = nx * ny
        expect = _HEADER.size + 9 * n
        if len(data) != expect:
            raise ValueError(f"expected {expect} bytes, got {len(data)}")
        off = _HEADER.size
        phase = np.frombuffer(data, dtype="<f8", count=n, offset=off).reshape(ny, nx).astype(float)
        valid = np.frombuffer(data, dtype=np.uint8, count=n, offset=off + 8 * n).reshape(ny, nx) != 0
        phase = np.where(valid, phase, np.nan)
        return cls(Window(smin, smax, tmin, tmax, nx, ny), phase, valid.copy())

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "PhaseField":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def resolve_threads(threads: int | None) -> int:
    if not threads:
        return os.cpu_count() or 1
    return max(1, int(threads))


def sample_phase_field(window: Window, cfg: EvalConfig = DEFAULT_CONFIG, threads: int | None = 0) -> PhaseField:
    """Evaluate arg Z on every grid point of ``window``.

    Poles (within ``cfg.pole_radius`` of 0 and 1) and failed evaluations are
    recorded as ``valid == False``. The result is bit-identical for any
    ``threads`` value (0 means one worker per CPU).
    """
    s = window.sigmas[:, None] + 1j * window.ts[None, :]
    phase = np.empty(s.shape)
    valid = np.empty(s.shape, dtype=bool)

    def work(r0: int) -> None:
        r1 = min(r0 + ROW_BLOCK, window.ny)
        _, ph, ok = log_completed_zeta_array(s[r0:r1], cfg)
        phase[r0:r1] = ph
        valid[r0:r1] = ok

    starts = range(0, window.ny, ROW_BLOCK)
    n_workers = resolve_threads(threads)
    if n_workers == 1:
        for r0 in starts:
            work(r0)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(work, starts))
    return PhaseField(window, phase, valid, cfg)
