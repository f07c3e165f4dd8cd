"""HSV range segmentation into thick ice / thin ice / open water.

Class ids are fixed globally: 0 = thick, 1 = thin, 2 = water. The label
palette is thick -> red, thin -> blue, water -> green. The shipped default
profile covers the Antarctic Ross Sea summer imagery this toolkit was
built around: thick (0,0,205)-(185,255,255), thin (0,0,31)-(185,255,204),
water (0,0,0)-(185,255,30).
"""

from __future__ import annotations

import dataclasses
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import BadRange, InvalidProfile, OffPaletteColor, WrongChannelCount
from .imgproc import BinaryMask
from .raster import HsvRaster, Raster

__all__ = [
    "CLASS_NAMES",
    "PALETTE",
    "ThresholdProfile",
    "LabelMap",
    "ProfileReport",
    "default_profile",
    "in_range",
    "segment",
    "segment_counted",
    "render_labels",
    "parse_labels",
    "validate_profile",
]

CLASS_NAMES = ("thick", "thin", "water")
PALETTE = np.array([[255, 0, 0], [0, 0, 255], [0, 255, 0]], dtype=np.uint8)

Triple = tuple[int, int, int]


@dataclasses.dataclass(frozen=True)
class LabelMap:
    """Per-pixel class ids in {0, 1, 2}."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.uint8)
        if arr.shape != (self.height, self.width):
            raise ValueError(f"label shape {arr.shape} != ({self.height}, {self.width})")
        if arr.max(initial=0) > 2:
            raise ValueError("label ids must be in {0, 1, 2}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "LabelMap":
        arr = np.asarray(arr)
        return cls(arr.shape[1], arr.shape[0], arr)

    def class_fractions(self) -> dict[str, float]:
        counts = np.bincount(self.data.ravel(), minlength=3)
        total = self.data.size
        return {name: counts[i] / total for i, name in enumerate(CLASS_NAMES)}


@dataclasses.dataclass(frozen=True)
class ThresholdProfile:
    """Per-class HSV lower/upper bounds plus free-text provenance tags."""

    name: str
    season: str
    region: str
    classes: dict[str, tuple[Triple, Triple]]

    def __post_init__(self):
        for cname in CLASS_NAMES:
            if cname not in self.classes:
                raise InvalidProfile(f"profile missing class {cname!r}")
            lo, hi = self.classes[cname]
            for i, axis in enumerate("hsv"):
                if lo[i] > hi[i]:
                    raise InvalidProfile(
                        f"classes.{cname}.lo.{axis} ({lo[i]}) > hi.{axis} ({hi[i]})"
                    )

    def bounds(self, cname: str) -> tuple[Triple, Triple]:
        return self.classes[cname]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "season": self.season,
            "region": self.region,
            "classes": {
                c: {"lo": list(lo), "hi": list(hi)} for c, (lo, hi) in self.classes.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ThresholdProfile":
        try:
            classes = {
                c: (tuple(spec["lo"]), tuple(spec["hi"]))
                for c, spec in d["classes"].items()
            }
            return cls(
                name=d.get("name", ""),
                season=d.get("season", ""),
                region=d.get("region", ""),
                classes=classes,
            )
        except (KeyError, TypeError, IndexError) as e:
            raise InvalidProfile(f"malformed profile: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "ThresholdProfile":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidProfile(f"profile is not valid JSON: {e}") from e
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "ThresholdProfile":
        return cls.from_json(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())


def default_profile() -> ThresholdProfile:
    """The shipped Ross Sea summer profile."""
    text = resources.files("iceseg").joinpath("profiles/default_profile.json").read_text()
    return ThresholdProfile.from_json(text)


def in_range(h: HsvRaster, lo: Triple, hi: Triple) -> BinaryMask:
    """255 where lo <= (H,S,V) <= hi componentwise (inclusive), else 0."""
    for i in range(3):
        if lo[i] > hi[i]:
            raise BadRange(f"lo {lo} > hi {hi} on component {i}")
    d = h.data
    ok = np.ones(d.shape[:2], dtype=bool)
    for i in range(3):
        ok &= (d[..., i] >= lo[i]) & (d[..., i] <= hi[i])
    return BinaryMask.from_bool(ok)


def _class_matches(h: HsvRaster, p: ThresholdProfile) -> np.ndarray:
    """Boolean (3, H, W) match stack in class-id order."""
    d = h.data.astype(np.int16)
    out = np.empty((3,) + d.shape[:2], dtype=bool)
    for ci, cname in enumerate(CLASS_NAMES):
        lo, hi = p.bounds(cname)
        ok = np.ones(d.shape[:2], dtype=bool)
        for i in range(3):
            ok &= (d[..., i] >= lo[i]) & (d[..., i] <= hi[i])
        out[ci] = ok
    return out


def segment_counted(h: HsvRaster, p: ThresholdProfile) -> tuple[LabelMap, int]:
    """Segment and also report how many pixels needed the gap fallback.

    Overlapping ranges resolve by priority thick > thin > water. Pixels no
    class matches take the nearest class by V-distance to its V interval,
    ties again by priority, so segmentation is total even for profiles
    mid-edit in the calibration UI.
    """
    matches = _class_matches(h, p)
    matched_any = matches.any(axis=0)
    label = np.argmax(matches, axis=0).astype(np.uint8)

    fallback = int(matched_any.size - np.count_nonzero(matched_any))
    if fallback:
        v = h.data[..., 2].astype(np.int16)
        dists = np.empty((3,) + v.shape, dtype=np.int16)
        for ci, cname in enumerate(CLASS_NAMES):
            lo, hi = p.bounds(cname)
            dists[ci] = np.maximum(np.maximum(lo[2] - v, v - hi[2]), 0)
        nearest = np.argmin(dists, axis=0).astype(np.uint8)
        label = np.where(matched_any, label, nearest)
    return LabelMap.from_array(label), fallback


def segment(h: HsvRaster, p: ThresholdProfile) -> LabelMap:
    """Per-pixel class ids under the profile; see segment_counted."""
    return segment_counted(h, p)[0]


def render_labels(m: LabelMap) -> Raster:
    """LabelMap -> RGB raster with the fixed palette."""
    return Raster.from_array(PALETTE[m.data])


def parse_labels(r: Raster) -> LabelMap:
    """RGB label raster -> LabelMap; every pixel must hit the palette exactly."""
    if r.channels != 3:
        raise WrongChannelCount("parse_labels needs an RGB raster")
    d = r.data
    label = np.full(d.shape[:2], 255, dtype=np.uint8)
    for ci in range(3):
        hit = (d == PALETTE[ci]).all(axis=-1)
        label[hit] = ci
    bad = label == 255
    if bad.any():
        ys, xs = np.nonzero(bad)
        y, x = int(ys[0]), int(xs[0])
        raise OffPaletteColor(
            f"pixel ({x}, {y}) has color {tuple(int(c) for c in d[y, x])}, not in palette"
        )
    return LabelMap.from_array(label)


@dataclasses.dataclass(frozen=True)
class ProfileReport:
    disjoint: bool
    covering: bool
    gaps: list

    def to_dict(self) -> dict:
        return {"disjoint": self.disjoint, "covering": self.covering, "gaps": list(self.gaps)}


def _full_hs(p: ThresholdProfile) -> bool:
    for cname in CLASS_NAMES:
        lo, hi = p.bounds(cname)
        if not (lo[0] == 0 and hi[0] >= 180 and lo[1] == 0 and hi[1] >= 255):
            return False
    return True


def validate_profile(p: ThresholdProfile) -> ProfileReport:
    """Check the three class ranges are disjoint and cover all of HSV space.

    When every class spans full H and S the check reduces to exact interval
    arithmetic on the V axis; otherwise a 181 x 16 x 256 lattice is sampled.
    Gaps are reported as uncovered [v_lo, v_hi] intervals.
    """
    for cname in CLASS_NAMES:
        lo, hi = p.bounds(cname)
        for i in range(3):
            if lo[i] > hi[i]:
                raise BadRange(f"{cname}: lo > hi")

    if _full_hs(p):
        covered = np.zeros(256, dtype=np.int32)
        for cname in CLASS_NAMES:
            lo, hi = p.bounds(cname)
            covered[max(lo[2], 0): min(hi[2], 255) + 1] += 1
        disjoint = bool((covered <= 1).all())
        covering = bool((covered >= 1).all())
        gaps = _runs(np.nonzero(covered == 0)[0])
        return ProfileReport(disjoint, covering, gaps)

    hs_axis = np.arange(181, dtype=np.int16)
    ss_axis = np.arange(16, dtype=np.int16) * 17
    vs_axis = np.arange(256, dtype=np.int16)
    hgrid, sgrid, vgrid = np.meshgrid(hs_axis, ss_axis, vs_axis, indexing="ij")
    count = np.zeros(hgrid.shape, dtype=np.int8)
    for cname in CLASS_NAMES:
        lo, hi = p.bounds(cname)
        ok = (
            (hgrid >= lo[0]) & (hgrid <= hi[0])
            & (sgrid >= lo[1]) & (sgrid <= hi[1])
            & (vgrid >= lo[2]) & (vgrid <= hi[2])
        )
        count += ok
    disjoint = bool((count <= 1).all())
    covering = bool((count >= 1).all())
    uncovered_v = np.unique(vgrid[count == 0])
    gaps = _runs(uncovered_v)
    return ProfileReport(disjoint, covering, gaps)


def _runs(values: np.ndarray) -> list:
    """Collapse sorted ints into [lo, hi] runs."""
    out = []
    for v in values:
        v = int(v)
        if out and out[-1][1] == v - 1:
            out[-1][1] = v
        else:
            out.append([v, v])
    return out
