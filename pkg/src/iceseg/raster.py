"""Raster containers, PNG I/O, and the exact RGB->HSV conversion.

All pixel data is 8-bit. HSV uses the half-angle convention: H in 0..180,
S and V in 0..255. Rounding is round-half-up on the exact rational value,
so downstream threshold comparisons are reproducible bit for bit.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import UnsupportedFormat, WrongChannelCount

__all__ = [
    "Raster",
    "HsvRaster",
    "load_png",
    "save_png",
    "rgb_to_hsv",
    "gray_raster",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    arr.setflags(write=False)
    return arr


@dataclasses.dataclass(frozen=True)
class Raster:
    """8-bit image grid, grayscale (H, W) or RGB (H, W, 3), row-major."""

    width: int
    height: int
    channels: int
    data: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("raster must be at least 1x1")
        if self.channels not in (1, 3):
            raise WrongChannelCount(f"channels must be 1 or 3, got {self.channels}")
        expected = (self.height, self.width) if self.channels == 1 else (self.height, self.width, 3)
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} != expected {expected}")
        object.__setattr__(self, "data", _freeze(self.data))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Raster":
        arr = np.asarray(arr)
        if arr.ndim == 2:
            return cls(arr.shape[1], arr.shape[0], 1, arr)
        if arr.ndim == 3 and arr.shape[2] == 3:
            return cls(arr.shape[1], arr.shape[0], 3, arr)
        raise WrongChannelCount(f"expected (H,W) or (H,W,3) array, got shape {arr.shape}")


@dataclasses.dataclass(frozen=True)
class HsvRaster:
    """Row-major (H, S, V) triples with H in 0..180, S and V in 0..255."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.height, self.width, 3):
            raise ValueError(f"data shape {self.data.shape} != expected")
        if self.data[..., 0].max(initial=0) > 180:
            raise ValueError("H sample exceeds 180")
        object.__setattr__(self, "data", _freeze(self.data))


def gray_raster(value: int, width: int, height: int) -> Raster:
    """Constant single-channel raster, handy as an abs-diff reference."""
    return Raster.from_array(np.full((height, width), value, dtype=np.uint8))


def load_png(path) -> Raster:
    """Decode an 8-bit grayscale or RGB PNG. Alpha is dropped, palettes expanded."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    try:
        img = Image.open(path)
        img.load()
    except UnidentifiedImageError as e:
        raise UnsupportedFormat(f"{path}: not a decodable image") from e
    mode = img.mode
    if mode in ("I", "I;16", "I;16B", "I;16L", "F"):
        raise UnsupportedFormat(f"{path}: 16-bit or float PNG not supported")
    if mode == "P":
        img = img.convert("RGBA" if "transparency" in img.info else "RGB")
        mode = img.mode
    if mode == "LA":
        img = img.convert("L")
    elif mode == "RGBA":
        img = img.convert("RGB")
    elif mode == "1":
        img = img.convert("L")
    elif mode not in ("L", "RGB"):
        raise UnsupportedFormat(f"{path}: unsupported mode {mode}")
    return Raster.from_array(np.asarray(img, dtype=np.uint8))


def save_png(r: Raster, path) -> None:
    """Write a raster losslessly; round trips with load_png."""
    if r.channels not in (1, 3):
        raise WrongChannelCount(f"cannot save {r.channels}-channel raster")
    img = Image.fromarray(np.asarray(r.data), mode="L" if r.channels == 1 else "RGB")
    try:
        img.save(Path(path), format="PNG")
    except (OSError, ValueError) as e:
        raise IOError(f"failed to write {path}: {e}") from e


def rgb_to_hsv(r: Raster) -> HsvRaster:
    """Exact integer RGB->HSV.

    V = max(R,G,B); S = round(255*(V-min)/V) (0 when V=0); H is the
    half-angle hue, round(H_deg/2), with the R/G/B sector picked by the
    first channel equal to V (priority R, then G, then B) and negative
    angles wrapped by +360. All rounding is half-up on the exact rational.
    """
    if r.channels != 3:
        raise WrongChannelCount("rgb_to_hsv needs a 3-channel raster")
    rgb = r.data.astype(np.int32)
    red, grn, blu = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    v = np.maximum(np.maximum(red, grn), blu)
    mn = np.minimum(np.minimum(red, grn), blu)
    delta = v - mn

    # S = round(255*delta/V), guarded against V=0
    v_safe = np.where(v == 0, 1, v)
    s = np.where(v == 0, 0, (510 * delta + v_safe) // (2 * v_safe))

    is_r = v == red
    is_g = ~is_r & (v == grn)
    num = np.where(is_r, grn - blu, np.where(is_g, blu - red, red - grn))
    base = np.where(is_r, 0, np.where(is_g, 2, 4))

    d_safe = np.where(delta == 0, 1, delta)
    # round-half-up of 30*num/delta; floor division handles negative num
    hq = (60 * num + d_safe) // (2 * d_safe)
    h = base * 30 + hq
    h = np.where(is_r & (grn < blu), 180 + hq, h)
    h = np.where(delta == 0, 0, h)

    out = np.stack([h, s, v], axis=-1).astype(np.uint8)
    return HsvRaster(r.width, r.height, out)
