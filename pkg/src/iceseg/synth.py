"""Synthetic polar scenes with exact ground truth.

Scenes are thin-ice sheets carrying bright floes and narrow water leads,
with per-pixel brightness drawn strictly inside each class's V range, so
the default threshold profile labels a clean scene perfectly. The hazed
variant adds a smooth low-frequency brightness field, which is what the
cloud/shadow filter is meant to undo. Realism is a non-goal; label
correctness is the point.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy import ndimage

from .colorseg import LabelMap
from .errors import BadConfig
from .raster import Raster

__all__ = ["SynthConfig", "generate", "smooth_field"]

# class V ranges from the default profile; configs must nest inside these
_CLASS_V = {"thick": (205, 255), "thin": (31, 204), "water": (0, 30)}


@dataclasses.dataclass(frozen=True)
class SynthConfig:
    size: int = 256
    n_floes: int = 12
    floe_v_range: tuple[int, int] = (210, 250)
    thin_ice_v_range: tuple[int, int] = (95, 150)
    water_v_range: tuple[int, int] = (6, 26)
    haze_amplitude: int = 0
    haze_coverage: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.size < 32:
            raise BadConfig("size must be >= 32")
        if self.n_floes < 0:
            raise BadConfig("n_floes must be >= 0")
        for rng, cname in (
            (self.floe_v_range, "thick"),
            (self.thin_ice_v_range, "thin"),
            (self.water_v_range, "water"),
        ):
            lo, hi = _CLASS_V[cname]
            if not (lo <= rng[0] <= rng[1] <= hi):
                raise BadConfig(f"{cname} V range {rng} not nested inside {lo}..{hi}")
        if not 0 <= self.haze_amplitude <= 80:
            raise BadConfig("haze_amplitude must be in 0..80")
        if not 0.0 <= self.haze_coverage <= 1.0:
            raise BadConfig("haze_coverage must be in 0..1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        d = dict(d)
        for key in ("floe_v_range", "thin_ice_v_range", "water_v_range"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def smooth_field(rng: np.random.Generator, size: int, cells: int) -> np.ndarray:
    """Smooth noise in [0, 1]: a coarse random grid cubically upsampled."""
    grid = rng.random((cells + 3, cells + 3))
    coords = np.linspace(1.0, cells + 1.0, size)
    yy, xx = np.meshgrid(coords, coords, indexing="ij")
    field = ndimage.map_coordinates(grid, [yy, xx], order=3, mode="nearest")
    lo, hi = field.min(), field.max()
    if hi > lo:
        field = (field - lo) / (hi - lo)
    else:
        field = np.zeros_like(field)
    return field


def _ellipse_field(rng: np.random.Generator, size: int, n: int,
                   ax_lo: float, ax_hi: float) -> np.ndarray:
    """Max over n soft ellipses of (1 - normalized distance); > 0 inside."""
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    field = np.zeros((size, size))
    scale = size / 256.0
    for _ in range(n):
        cy, cx = rng.uniform(0, size, 2)
        a = rng.uniform(ax_lo, ax_hi) * scale
        b = rng.uniform(ax_lo, ax_hi) * scale
        theta = rng.uniform(0, np.pi)
        ct, st = np.cos(theta), np.sin(theta)
        u = (xx - cx) * ct + (yy - cy) * st
        w = -(xx - cx) * st + (yy - cy) * ct
        q = np.sqrt((u / a) ** 2 + (w / b) ** 2)
        field = np.maximum(field, 1.0 - q)
    return field


def _lerp_u8(lo: int, hi: int, t: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(lo + (hi - lo) * t + 0.5), lo, hi).astype(np.int32)


def generate(cfg: SynthConfig) -> tuple[Raster, Raster, LabelMap]:
    """Return (clean scene, hazed scene, ground-truth labels)."""
    rng = np.random.default_rng(np.random.SeedSequence([0x5CE4E, cfg.seed]))
    size = cfg.size

    # winding leads: a thin level-set band of a coarse field, plus a pond
    lead_field = smooth_field(rng, size, 5)
    water = np.abs(lead_field - 0.5) < 0.03
    n_ponds = max(1, cfg.n_floes // 4)
    water |= _ellipse_field(rng, size, n_ponds, 5.0, 14.0) > 0.0

    floe = _ellipse_field(rng, size, cfg.n_floes, 7.0, 22.0)
    thick = floe > 0.0

    label = np.ones((size, size), dtype=np.uint8)  # thin by default
    label[water] = 2
    label[thick] = 0  # floes sit on top of everything

    v = np.zeros((size, size), dtype=np.int32)
    tex = smooth_field(rng, size, 8)
    lo, hi = cfg.thin_ice_v_range
    v_thin = _lerp_u8(lo, hi, tex)
    lo, hi = cfg.water_v_range
    v_water = _lerp_u8(lo, hi, tex)
    lo, hi = cfg.floe_v_range
    # soft-edged floes: brightness eases from the floe range's low end at
    # the rim toward its top inside, always staying inside the thick range
    rim = np.clip(floe * 4.0, 0.0, 1.0)
    v_thick = _lerp_u8(lo, hi, rim * (0.6 + 0.4 * tex))
    v[...] = v_thin
    v[water] = v_water[water]
    v[thick] = v_thick[thick]

    # near-gray chroma: drop two channels by <= 3 so V = max(R,G,B) holds
    drops = rng.integers(0, 4, size=(size, size, 3), dtype=np.int32)
    drops -= drops.min(axis=2, keepdims=True)
    clean_arr = np.clip(v[..., None] - drops, 0, 255).astype(np.uint8)
    clean = Raster.from_array(clean_arr)
    truth = LabelMap.from_array(label)

    if cfg.haze_amplitude == 0 or cfg.haze_coverage == 0.0:
        return clean, clean, truth

    haze = haze_field(rng, size, cfg.haze_amplitude, cfg.haze_coverage)
    hazed_arr = np.clip(clean_arr.astype(np.int32) + haze[..., None], 0, 255).astype(np.uint8)
    return clean, Raster.from_array(hazed_arr), truth


def haze_field(rng: np.random.Generator, size: int, amplitude: int,
               coverage: float) -> np.ndarray:
    """Additive low-frequency brightness field (int32, >= 0).

    Inside the covered region the amplitude stays in the upper half of
    [0, amplitude] so the deviation is comfortably detectable; the
    coverage boundary is feathered.
    """
    strength = smooth_field(rng, size, 2)
    region = smooth_field(rng, size, 2)
    if coverage >= 1.0:
        m = np.ones((size, size))
    else:
        q = np.quantile(region, 1.0 - coverage)
        m = np.clip((region - q) / 0.08 + 0.5, 0.0, 1.0)  # feathered step
    add = amplitude * (0.5 + 0.5 * strength) * m
    return np.floor(add + 0.5).astype(np.int32)
