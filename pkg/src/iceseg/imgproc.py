"""Grayscale primitives for the cloud/shadow filter.

Thresholding (binary, inverted, truncate), Otsu's level, min-max
normalization, absolute difference, median/box smoothing, and bitwise
mask algebra. All comparisons in thresholding are strict (out is "above"
only when strictly greater than t).
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy import ndimage

from .errors import BadKernel, BadRange, DimensionMismatch, WrongChannelCount
from .raster import Raster

__all__ = [
    "BinaryMask",
    "threshold",
    "otsu_level",
    "minmax_normalize",
    "abs_diff",
    "smooth",
    "bitwise",
]


@dataclasses.dataclass(frozen=True)
class BinaryMask:
    """Mask raster whose samples are exactly 0 or 255."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.uint8)
        if arr.shape != (self.height, self.width):
            raise ValueError(f"mask shape {arr.shape} != ({self.height}, {self.width})")
        if not np.isin(arr, (0, 255)).all():
            raise ValueError("mask samples must be 0 or 255")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_bool(cls, b: np.ndarray) -> "BinaryMask":
        arr = np.where(b, 255, 0).astype(np.uint8)
        return cls(arr.shape[1], arr.shape[0], arr)

    def to_bool(self) -> np.ndarray:
        return self.data == 255

    def fraction(self) -> float:
        """Share of set pixels."""
        return float(np.count_nonzero(self.data)) / self.data.size


def _require_gray(g: Raster, op: str) -> None:
    if g.channels != 1:
        raise WrongChannelCount(f"{op} needs a single-channel raster")


def threshold(g: Raster, mode: str, t: int, maxval: int = 255) -> Raster:
    """Pixelwise threshold.

    binary: maxval where g > t else 0; binary_inv: 0 where g > t else
    maxval; truncate: min(g, t). maxval is ignored by truncate.
    """
    _require_gray(g, "threshold")
    data = g.data
    if mode == "binary":
        out = np.where(data > t, maxval, 0)
    elif mode == "binary_inv":
        out = np.where(data > t, 0, maxval)
    elif mode == "truncate":
        out = np.minimum(data, t)
    else:
        raise ValueError(f"unknown threshold mode {mode!r}")
    return Raster.from_array(out.astype(np.uint8))


def otsu_level(g: Raster) -> int:
    """Threshold maximizing between-class variance over the 256-bin histogram.

    Classes are {<= t} and {> t}. Ties break to the smallest t; a constant
    image returns its own value so nothing gets masked downstream.

    sigma_b(t) = w0*w1*(mu0-mu1)^2 is proportional to
    (s0*n1 - s1*n0)^2 / (n0*n1), which is compared in exact integer
    arithmetic so tie-breaking never depends on float noise.
    """
    _require_gray(g, "otsu_level")
    data = g.data
    lo, hi = int(data.min()), int(data.max())
    if lo == hi:
        return lo
    hist = np.bincount(data.ravel(), minlength=256)
    cum_n = np.cumsum(hist)
    cum_s = np.cumsum(hist * np.arange(256, dtype=np.int64))
    n_total = int(cum_n[-1])
    s_total = int(cum_s[-1])
    best_t, best_num, best_den = 0, 0, 1
    for t in range(256):
        n0 = int(cum_n[t])
        n1 = n_total - n0
        if n0 == 0 or n1 == 0:
            num, den = 0, 1
        else:
            s0 = int(cum_s[t])
            a = s0 * n1 - (s_total - s0) * n0
            num, den = a * a, n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def minmax_normalize(g: Raster, lo: int, hi: int) -> Raster:
    """Linearly map the raster's [min, max] onto [lo, hi], rounding half-up.

    A constant image maps to lo.
    """
    _require_gray(g, "minmax_normalize")
    if lo > hi:
        raise BadRange(f"lo {lo} > hi {hi}")
    data = g.data.astype(np.int64)
    gmin, gmax = int(data.min()), int(data.max())
    if gmin == gmax:
        return Raster.from_array(np.full_like(g.data, lo))
    span = gmax - gmin
    num = lo * span + (data - gmin) * (hi - lo)
    out = (2 * num + span) // (2 * span)
    return Raster.from_array(out.astype(np.uint8))


def abs_diff(a: Raster, b: Raster) -> Raster:
    """Per-pixel |a - b|."""
    _require_gray(a, "abs_diff")
    _require_gray(b, "abs_diff")
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch("abs_diff operands differ in size")
    out = np.abs(a.data.astype(np.int16) - b.data.astype(np.int16))
    return Raster.from_array(out.astype(np.uint8))


def smooth(g: Raster, mode: str, k: int) -> Raster:
    """k x k median or box smoothing with edge replication; k odd."""
    _require_gray(g, "smooth")
    if k < 1 or k % 2 == 0:
        raise BadKernel(f"kernel size must be odd and >= 1, got {k}")
    if k == 1:
        return g
    if mode == "median":
        out = ndimage.median_filter(g.data, size=k, mode="nearest")
        return Raster.from_array(out)
    if mode == "box":
        pad = k // 2
        padded = np.pad(g.data, pad, mode="edge").astype(np.int64)
        # integral image: window sums in O(1) per pixel
        ii = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.int64)
        ii[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
        h, w = g.data.shape
        sums = ii[k:k + h, k:k + w] - ii[:h, k:k + w] - ii[k:k + h, :w] + ii[:h, :w]
        area = k * k
        out = (2 * sums + area) // (2 * area)
        return Raster.from_array(out.astype(np.uint8))
    raise ValueError(f"unknown smooth mode {mode!r}")


def bitwise(a: BinaryMask, b: BinaryMask | None, op: str) -> BinaryMask:
    """Boolean combination of masks; 255 is true. b must be None for 'not'."""
    if op == "not":
        if b is not None:
            raise ValueError("'not' takes a single operand")
        return BinaryMask.from_bool(~a.to_bool())
    if b is None:
        raise ValueError(f"'{op}' needs two operands")
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatch("bitwise operands differ in size")
    if op == "and":
        return BinaryMask.from_bool(a.to_bool() & b.to_bool())
    if op == "or":
        return BinaryMask.from_bool(a.to_bool() | b.to_bool())
    raise ValueError(f"unknown bitwise op {op!r}")
