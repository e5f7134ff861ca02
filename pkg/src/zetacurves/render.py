"""Raster (PNG) and vector (SVG) pictures of the blue/green curves.

Axes are swapped relative to the usual complex plane: t runs left to right,
sigma runs bottom to top. The real axis is therefore a vertical line and the
critical line sigma = 1/2 a horizontal one.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from PIL import Image
from PIL.PngImagePlugin import PngInfo
from scipy.ndimage import binary_dilation

from . import __version__
from .contour import Color, CurveSet
from .field import PhaseField, Window

RGB = tuple[int, int, int]
MAX_PIXELS = 10**8
MAX_LINE_PX = 8


class NonFiniteStyle(ValueError):
    pass


class OversizeImage(ValueError):
    pass


class DrawOrder(str, Enum):
    GREEN_OVER_BLUE = "green-over-blue"
    BLUE_OVER_GREEN = "blue-over-green"


@dataclass(frozen=True)
class RenderStyle:
    width: int = 1600
    height: int = 1000
    background: RGB = (255, 255, 255)
    blue: RGB = (0, 0, 255)
    green: RGB = (0, 170, 0)
    line_px: int = 1  # 1 = the bare sign-change pixels; k dilates by k - 1
    draw_order: DrawOrder = DrawOrder.GREEN_OVER_BLUE

    def __post_init__(self):
        for name in ("width", "height", "line_px"):
            v = getattr(self, name)
            if isinstance(v, float) and not math.isfinite(v):
                raise NonFiniteStyle(f"{name} is not finite")
            if not isinstance(v, (int, np.integer)) or v <= 0:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if self.width < 2 or self.height < 2:
            raise ValueError("width and height must be at least 2")
        if self.width * self.height > MAX_PIXELS:
            raise OversizeImage(f"{self.width}x{self.height} exceeds {MAX_PIXELS} pixels")
        if self.line_px > MAX_LINE_PX:
            raise ValueError(f"line_px must be <= {MAX_LINE_PX}")
        for name in ("background", "blue", "green"):
            rgb = getattr(self, name)
            if len(rgb) != 3:
                raise ValueError(f"{name} must be an RGB triple")
            for c in rgb:
                if isinstance(c, float) and not math.isfinite(c):
                    raise NonFiniteStyle(f"{name} has a non-finite component")
                if not 0 <= c <= 255:
                    raise ValueError(f"{name} component {c} outside 0..255")
        object.__setattr__(self, "draw_order", DrawOrder(self.draw_order))


# ----------------------------------------------------------------- axis mapping


def pixel_to_s(window: Window, width: int, height: int, x, y):
    """Pixel (x, y) -> (sigma, t). Works elementwise on arrays."""
    t = window.t_min + np.asarray(x, dtype=float) * (window.t_max - window.t_min) / (width - 1)
    sigma = window.sigma_max - np.asarray(y, dtype=float) * (window.sigma_max - window.sigma_min) / (height - 1)
    return sigma, t


def s_to_pixel(window: Window, width: int, height: int, sigma, t):
    """(sigma, t) -> fractional pixel (x, y); inverse of ``pixel_to_s``."""
    x = (np.asarray(t, dtype=float) - window.t_min) * (width - 1) / (window.t_max - window.t_min)
    y = (window.sigma_max - np.asarray(sigma, dtype=float)) * (height - 1) / (window.sigma_max - window.sigma_min)
    return x, y


def _window_text(w: Window) -> str:
    f = lambda v: repr(float(v))
    return f"sigma=[{f(w.sigma_min)},{f(w.sigma_max)}] t=[{f(w.t_min)},{f(w.t_max)}]"


def window_for_style(window: Window, style: RenderStyle) -> Window:
    """The sampling window whose grid coincides with the image pixels."""
    return window.with_size(style.width, style.height)


# ----------------------------------------------------------------- raster


@dataclass(frozen=True, eq=False)
class RasterImage:
    rgb: np.ndarray  # (height, width, 3) uint8
    blue: np.ndarray  # (height, width) bool, before compositing
    green: np.ndarray
    masked: np.ndarray
    window: Window
    style: RenderStyle

    def metadata(self) -> dict[str, str]:
        w = self.window
        return {
            "Software": f"zetacurves v{__version__}",
            "Window": _window_text(w),
            "Resolution": f"{self.style.width}x{self.style.height}",
            "Axes": "t horizontal (left to right), sigma vertical (increasing upward)",
        }

    def to_png_bytes(self) -> bytes:
        info = PngInfo()
        for k, v in self.metadata().items():
            info.add_text(k, v)
        buf = io.BytesIO()
        Image.fromarray(self.rgb, mode="RGB").save(buf, format="PNG", pnginfo=info, compress_level=6, optimize=False)
        return buf.getvalue()

    def save(self, path) -> None:
        data = self.to_png_bytes()
        with open(path, "wb") as fh:
            fh.write(data)


def _resample(field: PhaseField, style: RenderStyle):
    """Phase and mask in image layout (row 0 = sigma_max)."""
    w = field.window
    if (w.nx, w.ny) == (style.width, style.height):
        return field.phase[::-1], field.valid[::-1]
    x = np.arange(style.width)
    y = np.arange(style.height)
    sigma, t = pixel_to_s(w, style.width, style.height, x[None, :], y[:, None])
    col = np.clip(np.rint((t - w.t_min) / w.d_t), 0, w.nx - 1).astype(int)
    row = np.clip(np.rint((sigma - w.sigma_min) / w.d_sigma), 0, w.ny - 1).astype(int) if w.ny > 1 \
        else np.zeros_like(col)
    col, row = np.broadcast_arrays(col, row)
    return field.phase[row, col], field.valid[row, col]


def _sign_change(g: np.ndarray, valid: np.ndarray) -> np.ndarray:
    pos = g >= 0
    out = np.zeros(g.shape, dtype=bool)
    right = (pos[:, :-1] != pos[:, 1:]) & valid[:, :-1] & valid[:, 1:]
    down = (pos[:-1, :] != pos[1:, :]) & valid[:-1, :] & valid[1:, :]
    out[:, :-1] |= right
    out[:-1, :] |= down
    return out


def render_raster(field: PhaseField, style: RenderStyle = RenderStyle()) -> RasterImage:
    """Paint a pixel blue when sin(arg Z) changes sign towards its right or lower
    neighbour, green likewise for cos(arg Z). Masked pixels stay background."""
    phase, valid = _resample(field, style)
    ph = np.where(valid, phase, 0.0)
    blue = _sign_change(np.sin(ph), valid)
    green = _sign_change(np.cos(ph), valid)
    if style.line_px > 1:
        k = 2 * (style.line_px - 1) + 1
        structure = np.ones((k, k), dtype=bool)
        blue = binary_dilation(blue, structure)
        green = binary_dilation(green, structure)
    masked = ~valid
    blue &= ~masked
    green &= ~masked

    rgb = np.empty((style.height, style.width, 3), dtype=np.uint8)
    rgb[...] = style.background
    layers = [(blue, style.blue), (green, style.green)]
    if style.draw_order is DrawOrder.BLUE_OVER_GREEN:
        layers.reverse()
    for mask, color in layers:
        rgb[mask] = color
    return RasterImage(rgb, blue, green, masked, field.window, style)


# ----------------------------------------------------------------- vector


def _hex(rgb: RGB) -> str:
    return "#{:02x}{:02x}{:02x}".format(*map(int, rgb))


@dataclass(frozen=True)
class VectorDocument:
    text: str

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.text)

    def __str__(self) -> str:
        return self.text


def render_vector(curves: CurveSet, style: RenderStyle = RenderStyle()) -> VectorDocument:
    """Standalone SVG with one <path> per curve, same axis mapping as the raster."""
    w = curves.window
    W, H = style.width, style.height
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        "<metadata>"
        f"window {_window_text(w)}; "
        f"resolution {W}x{H}; zetacurves v{__version__}"
        "</metadata>",
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="{_hex(style.background)}"/>',
    ]
    order = [Color.BLUE, Color.GREEN]
    if style.draw_order is DrawOrder.BLUE_OVER_GREEN:
        order.reverse()
    for color in order:
        group = curves.blue if color is Color.BLUE else curves.green
        stroke = _hex(style.blue if color is Color.BLUE else style.green)
        for c in group:
            x, y = s_to_pixel(w, W, H, c.points[:, 0], c.points[:, 1])
            d = "M" + " L".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))
            if c.closed:
                d += " Z"
            lines.append(
                f'<path class="{color.value} {c.classification.value}" d="{d}" fill="none" '
                f'stroke="{stroke}" stroke-width="{style.line_px}"/>'
            )
    lines.append("</svg>")
    return VectorDocument("\n".join(lines) + "\n")
