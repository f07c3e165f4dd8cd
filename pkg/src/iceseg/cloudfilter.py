"""Thin-cloud and shadow suppression, composed from the imgproc primitives.

The filter treats thin haze and shadow as a low-frequency brightness field:
median-denoise the HSV V channel, box-blur it into a background estimate,
mark pixels whose background deviates from the scene's typical illumination
(Otsu on the absolute deviation, widened by a margin), flat-field correct
the marked region, rescale it into the unmarked region's brightness range,
and scale R,G,B proportionally so hue and saturation survive. Pixels
outside the mask are returned bit-identical.

Thick clouds and shadows are out of scope; they hide the surface entirely.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import BadConfig, WrongChannelCount
from .imgproc import BinaryMask, abs_diff, otsu_level, smooth, threshold
from .raster import Raster, gray_raster, rgb_to_hsv

__all__ = ["CloudFilterParams", "filter_thin_clouds_shadows", "cloud_shadow_fraction", "detect_mask"]


@dataclasses.dataclass(frozen=True)
class CloudFilterParams:
    noise_kernel: int = 5
    background_kernel: int = 65
    mask_margin: int = 20
    blend: float = 1.0

    def __post_init__(self):
        for k in (self.noise_kernel, self.background_kernel):
            if k < 1 or k % 2 == 0:
                raise BadConfig(f"kernels must be odd and >= 1, got {k}")
        if not 0 <= self.mask_margin <= 128:
            raise BadConfig("mask_margin must be in 0..128")
        if not 0.0 <= self.blend <= 1.0:
            raise BadConfig("blend must be in 0..1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CloudFilterParams":
        return cls(**d)


def _analyze(r: Raster, p: CloudFilterParams):
    if r.channels != 3:
        raise WrongChannelCount("cloud filter needs an RGB raster")
    v = Raster.from_array(rgb_to_hsv(r).data[..., 2])
    g = smooth(v, "median", p.noise_kernel)
    b = smooth(g, "box", p.background_kernel)
    med = int(math.floor(float(np.median(b.data)) + 0.5))
    dev = abs_diff(b, gray_raster(med, r.width, r.height))
    t = otsu_level(dev)
    # margin widens the Otsu split toward smaller deviations, but never
    # below the margin itself: scenes whose background never strays past
    # the margin produce an empty mask and pass through untouched
    thr = max(t - p.mask_margin, p.mask_margin)
    mask_r = threshold(dev, "binary", thr, 255)
    mask = BinaryMask(r.width, r.height, mask_r.data)
    return mask, g, b, med


def detect_mask(r: Raster, p: CloudFilterParams) -> BinaryMask:
    """The cloud/shadow mask the filter would correct."""
    return _analyze(r, p)[0]


def cloud_shadow_fraction(r: Raster, p: CloudFilterParams) -> float:
    """Fraction of pixels inside the detected cloud/shadow mask."""
    return _analyze(r, p)[0].fraction()


def filter_thin_clouds_shadows(r: Raster, p: CloudFilterParams) -> Raster:
    """Suppress low-frequency brightness deviations inside the mask."""
    mask, g, b, med = _analyze(r, p)
    mb = mask.to_bool()
    if not mb.any():
        return r

    gi = g.data.astype(np.int32)
    bi = b.data.astype(np.int32)
    corrected = np.clip(gi - bi + med, 0, 255)

    unmasked = ~mb
    if unmasked.any():
        lo_u = int(gi[unmasked].min())
        hi_u = int(gi[unmasked].max())
        cm = corrected[mb].astype(np.int64)
        lo_m, hi_m = int(cm.min()), int(cm.max())
        if lo_m == hi_m:
            cm = np.full_like(cm, lo_u)
        else:
            span = hi_m - lo_m
            num = lo_u * span + (cm - lo_m) * (hi_u - lo_u)
            cm = (2 * num + span) // (2 * span)
        corrected = corrected.copy()
        corrected[mb] = cm

    orig = r.data.astype(np.int64)
    g_safe = np.maximum(gi, 1).astype(np.int64)
    out = orig.copy()
    for c in range(3):
        scaled = (2 * orig[..., c] * corrected + g_safe) // (2 * g_safe)
        scaled = np.where(gi > 0, np.clip(scaled, 0, 255), orig[..., c])
        if p.blend < 1.0:
            scaled = np.floor(p.blend * scaled + (1.0 - p.blend) * orig[..., c] + 0.5)
        out[..., c] = np.where(mb, scaled, orig[..., c])
    return Raster.from_array(out.astype(np.uint8))
