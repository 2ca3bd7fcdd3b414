"""Feasible color ranges.

Top-level classes draw from the default box: chroma and lightness in
[40, 85], minus the disliked zone (L in [40, 75] while hue in [85, 114]
degrees), intersected with the sRGB gamut.  When a class is expanded, its
children are confined to a sphere: a CIEDE2000 ball around the parent's
(adjusted) color, clipped by a hue interval and by the default box, sized
so that sibling spheres keep a gap larger than either radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .colorspace import (
    LabColor,
    LchColor,
    ciede2000,
    cross_ciede2000,
    in_gamut,
    lab_to_lch,
    lch_to_lab,
)
from .errors import ConfigurationError

BOX_LO, BOX_HI = 40.0, 85.0
NARROW_LO, NARROW_HI = 45.0, 80.0
EXCLUDE_L = (40.0, 75.0)
EXCLUDE_H = (85.0, 114.0)

# Sibling gap rule: d_ij - r_i - r_j must exceed GAP_COEFF * max(r_i, r_j).
GAP_COEFF = 1.0
SCALE_SLACK = 1e-6


def _hue_in(h, lo, hi):
    """Membership of hue h in the (possibly wrapping) interval [lo, hi]."""
    h = np.asarray(h, dtype=float) % 360.0
    lo %= 360.0
    hi %= 360.0
    if lo <= hi:
        return (h >= lo) & (h <= hi)
    return (h >= lo) | (h <= hi)


@dataclass(frozen=True)
class FeasibleRange:
    """Either the default box or a child sphere; membership is decidable."""

    variant: str  # "default-box" | "sphere"
    l_bounds: tuple[float, float] = (BOX_LO, BOX_HI)
    c_bounds: tuple[float, float] = (BOX_LO, BOX_HI)
    exclusion_l: Optional[tuple[float, float]] = EXCLUDE_L
    exclusion_h: Optional[tuple[float, float]] = EXCLUDE_H
    center: Optional[LabColor] = None
    radius: Optional[float] = None
    hue_interval: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.variant not in ("default-box", "sphere"):
            raise ConfigurationError(f"unknown range variant {self.variant!r}")
        if self.l_bounds[0] > self.l_bounds[1] or self.c_bounds[0] > self.c_bounds[1]:
            raise ConfigurationError("range box bounds must be ordered")
        if self.variant == "sphere":
            if self.center is None or self.radius is None or self.hue_interval is None:
                raise ConfigurationError("sphere range needs center, radius, hue_interval")
            if self.radius < 0:
                raise ConfigurationError("sphere radius must be >= 0")

    def contains_many(self, lch) -> np.ndarray:
        """Vectorized membership over (n, 3) LCh rows."""
        lch = np.atleast_2d(np.asarray(lch, dtype=float))
        L, C, h = lch[:, 0], lch[:, 1], lch[:, 2] % 360.0
        ok = (
            (L >= self.l_bounds[0])
            & (L <= self.l_bounds[1])
            & (C >= self.c_bounds[0])
            & (C <= self.c_bounds[1])
        )
        if self.exclusion_l is not None and self.exclusion_h is not None:
            disliked = (
                (L >= self.exclusion_l[0])
                & (L <= self.exclusion_l[1])
                & _hue_in(h, *self.exclusion_h)
            )
            ok &= ~disliked
        lab = lch_to_lab(np.stack([L, C, h], axis=-1))
        ok &= in_gamut(lab)
        if self.variant == "sphere":
            d = ciede2000(lab, np.asarray(self.center, dtype=float))
            ok &= d <= self.radius + 1e-12
            # nano-degree widening absorbs Lab<->LCh round-trip noise on
            # degenerate (zero-width) intervals
            lo, hi = self.hue_interval
            ok &= _hue_in(h, lo - 1e-9, hi + 1e-9)
        return ok

    def contains(self, c: LchColor) -> bool:
        return bool(self.contains_many(np.asarray(c, dtype=float)[None, :])[0])

    def sample_bounds(self):
        """A proposal box (L, C, hue interval) guaranteed to cover the range.

        For spheres the L slab uses |dL| <= 1.53 * radius (the CIEDE2000
        lightness compression bound inside the box), padded; chroma stays at
        the full box width because the chroma axis is strongly compressed.
        """
        if self.variant == "default-box":
            return self.l_bounds, self.c_bounds, (0.0, 360.0)
        c_lch = lab_to_lch(np.asarray(self.center, dtype=float))
        if self.radius <= 1e-12:
            return (
                (float(c_lch[0]), float(c_lch[0])),
                (float(c_lch[1]), float(c_lch[1])),
                (float(c_lch[2]), float(c_lch[2])),
            )
        span = 1.8 * self.radius + 2.0
        l_lo = max(self.l_bounds[0], float(c_lch[0]) - span)
        l_hi = min(self.l_bounds[1], float(c_lch[0]) + span)
        return (l_lo, l_hi), self.c_bounds, self.hue_interval

    def to_json(self, class_id: str) -> dict:
        out = {"class": class_id}
        if self.variant == "sphere":
            out["center"] = [float(v) for v in self.center]
            out["radius"] = float(self.radius)
            out["hue_interval"] = [float(self.hue_interval[0]), float(self.hue_interval[1])]
        else:
            out["center"] = None
            out["radius"] = None
            out["hue_interval"] = None
        return out


def default_range() -> FeasibleRange:
    return FeasibleRange(variant="default-box")


def narrowed_range() -> FeasibleRange:
    """The [45, 80] box used while adjusting sphere centers."""
    return FeasibleRange(
        variant="default-box",
        l_bounds=(NARROW_LO, NARROW_HI),
        c_bounds=(NARROW_LO, NARROW_HI),
    )


def contains(range_: FeasibleRange, c: LchColor) -> bool:
    return range_.contains(c)


@dataclass(frozen=True)
class RangeSet:
    """Per-class range references; every visible class has exactly one."""

    ranges: dict  # class id -> FeasibleRange

    def for_class(self, class_id: str) -> FeasibleRange:
        try:
            return self.ranges[class_id]
        except KeyError:
            raise ConfigurationError(f"no feasible range for class {class_id!r}") from None

    def to_json(self) -> list[dict]:
        return [r.to_json(cid) for cid, r in self.ranges.items()]


def _box_lattice():
    """Feasible default-range lattice used to bound single-sphere radii."""
    L = np.linspace(BOX_LO, BOX_HI, 15)
    C = np.linspace(BOX_LO, BOX_HI, 15)
    h = np.arange(0.0, 360.0, 5.0)
    pts = np.stack(np.meshgrid(L, C, h, indexing="ij"), axis=-1).reshape(-1, 3)
    mask = default_range().contains_many(pts)
    return lch_to_lab(pts[mask])


_LATTICE_CACHE: list = []


def _max_radius_in_box(center_lab) -> float:
    if not _LATTICE_CACHE:
        _LATTICE_CACHE.append(_box_lattice())
    lattice = _LATTICE_CACHE[0]
    return float(cross_ciede2000(np.asarray(center_lab, dtype=float)[None, :], lattice).max())


def _hue_half_width(radius, chroma) -> float:
    return math.degrees(math.asin(min(1.0, radius / max(chroma, 1e-9))))


def _circular_distance(a, b) -> float:
    return abs((a - b + 180.0) % 360.0 - 180.0)


def _radii_feasible(t, roots, dists, hues, chromas) -> bool:
    r = roots * t
    m = len(r)
    for i in range(m):
        for j in range(i + 1, m):
            if dists[i, j] - r[i] - r[j] < GAP_COEFF * max(r[i], r[j]):
                return False
            wi = _hue_half_width(r[i], chromas[i])
            wj = _hue_half_width(r[j], chromas[j])
            gap = _circular_distance(hues[i], hues[j]) - wi - wj
            if gap < 2.0 * max(wi, wj):
                return False
    return True


def determine_radii(centers, child_counts) -> RangeSet:
    """Size one sphere per center with r_i proportional to sqrt(n_i).

    The shared scale is the largest t such that every sphere pair keeps
    d_ij - r_i - r_j >= max(r_i, r_j) and hue intervals keep a circular gap
    of at least the longer interval; found by bisection, backed off by a
    fixed slack so the strict form of both rules holds.
    """
    classes = tuple(centers.classes)
    counts = np.array([float(child_counts[c]) for c in classes])
    if np.any(counts < 1):
        raise ConfigurationError("child counts must be >= 1")
    lch = centers.lch_array()
    lab = centers.lab_array()
    m = len(classes)
    roots = np.sqrt(counts)

    if m == 1:
        radius = _max_radius_in_box(lab[0])
        w = _hue_half_width(radius, lch[0, 1])
        sphere = _sphere(lab[0], radius, lch[0, 2], w)
        return RangeSet({classes[0]: sphere})

    dists = cross_ciede2000(lab, lab)
    iu = np.triu_indices(m, 1)
    if np.any(dists[iu] <= 1e-12):
        a, b = int(iu[0][np.argmin(dists[iu])]), int(iu[1][np.argmin(dists[iu])])
        raise ConfigurationError(
            f"coincident centers for classes {classes[a]!r} and {classes[b]!r}"
        )

    hues = lch[:, 2]
    chromas = lch[:, 1]
    lo, hi = 0.0, 1.0
    while _radii_feasible(hi, roots, dists, hues, chromas):
        hi *= 2.0
        if hi > 1e6:
            break
    for _ in range(80):  # bisection well past 1e-9 resolution
        mid = 0.5 * (lo + hi)
        if _radii_feasible(mid, roots, dists, hues, chromas):
            lo = mid
        else:
            hi = mid
    t = max(lo - SCALE_SLACK, 0.0)

    box_cap = [_max_radius_in_box(lab[i]) for i in range(m)]
    out = {}
    for i, cid in enumerate(classes):
        r = min(roots[i] * t, box_cap[i])
        w = _hue_half_width(r, chromas[i])
        out[cid] = _sphere(lab[i], r, hues[i], w)
    return RangeSet(out)


def _sphere(center_lab, radius, hue, half_width) -> FeasibleRange:
    return FeasibleRange(
        variant="sphere",
        center=LabColor(*(float(v) for v in center_lab)),
        radius=float(radius),
        hue_interval=((hue - half_width) % 360.0, (hue + half_width) % 360.0),
    )


def calibration_sphere(radius, center_lch=(62.5, 62.5, 30.0)) -> FeasibleRange:
    """A bare perceptual ball for capacity calibration.

    Unlike sibling spheres, the calibration ball is not clipped by the
    default box or the designer exclusion zone (only by the sRGB gamut);
    clipping would flatten the capacity-vs-radius curve at large radii
    and mask the square law being measured.
    """
    if radius <= 0:
        raise ConfigurationError("calibration radius must be positive")
    center_lch = tuple(float(v) for v in center_lch)
    lab = lch_to_lab(np.asarray(center_lch, dtype=float))
    w = _hue_half_width(radius, center_lch[1])
    return FeasibleRange(
        variant="sphere",
        l_bounds=(2.0, 98.0),
        c_bounds=(2.0, 148.0),
        exclusion_l=None,
        exclusion_h=None,
        center=LabColor(*(float(v) for v in lab)),
        radius=float(radius),
        hue_interval=((center_lch[2] - w) % 360.0, (center_lch[2] + w) % 360.0),
    )


def adjust_centers(parent_palette, ctx, cfg):
    """Re-optimize parent colors inside the narrowed [45, 80] box.

    Moves are additionally rejected unless each adjusted color stays
    strictly nearest to its own initial color, so the parent-to-sphere
    assignment never flips.
    """
    lab = parent_palette.lab_array()
    if len(parent_palette) > 1:
        d = cross_ciede2000(lab, lab)
        iu = np.triu_indices(len(parent_palette), 1)
        if np.any(d[iu] <= 1e-12):
            raise ConfigurationError("duplicate parent colors cannot anchor spheres")
    from .optimizer import reoptimize_centers

    return reoptimize_centers(parent_palette, ctx, cfg)


@dataclass(frozen=True)
class ChildRanges:
    """Spheres per parent plus the center adjustments that produced them."""

    spheres: RangeSet
    adjusted: object  # Palette of adjusted centers
    deltas: dict  # parent id -> CIEDE2000 between initial and adjusted color
    warnings: tuple[str, ...] = ()


def make_child_ranges(parent_palette, child_counts, ctx, cfg) -> ChildRanges:
    """Compose adjust_centers and determine_radii; probe sphere capacity."""
    import warnings as _warnings

    from .errors import RangeCapacityWarning
    from .sampling import SamplerConfig, capacity

    adjusted = adjust_centers(parent_palette, ctx, cfg)
    spheres = determine_radii(adjusted, child_counts)
    deltas = {}
    for cid in parent_palette.classes:
        a = lch_to_lab(np.asarray(parent_palette.color_of(cid), dtype=float))
        b = lch_to_lab(np.asarray(adjusted.color_of(cid), dtype=float))
        deltas[cid] = float(ciede2000(a, b))
    notes = []
    if getattr(cfg, "capacity_probe_trials", 0) > 0:
        probe = SamplerConfig(
            min_distance=10.0,
            max_consecutive_rejections=getattr(cfg, "capacity_probe_budget", 400),
            seed=getattr(cfg, "seed", 0),
        )
        for cid in parent_palette.classes:
            need = int(child_counts[cid])
            got = capacity(spheres.for_class(cid), probe, trials=cfg.capacity_probe_trials)
            if got < need:
                msg = (
                    f"sphere for {cid!r} holds ~{got:.0f} discernible colors "
                    f"but {need} children were requested"
                )
                notes.append(msg)
                _warnings.warn(msg, RangeCapacityWarning)
    return ChildRanges(
        spheres=spheres, adjusted=adjusted, deltas=deltas, warnings=tuple(notes)
    )
