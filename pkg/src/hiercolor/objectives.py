"""Objective terms for palette quality.

Three goal families are scored here:

* discriminability E_D — minimal pairwise perceptual difference (with a
  penalty below 10 units) plus the name difference, weighted gamma1/gamma2;
* harmony E_H — hue-template fit (rotatable sector templates on the hue
  wheel) plus closeness of the palette to a straight line in the
  chroma-lightness plane;
* spatial distribution E_SD — a layout-aware term that pushes neighboring
  samples' colors apart (difference mode) or pulls similar classes
  together (similarity mode).

The combined objective is E_D + alpha*E_H + beta*E_SD, maximized subject
to the priority chain E_D >= E_H >= E_SD on normalized terms.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np

from .colorspace import (
    LchColor,
    lab_to_lch,
    lch_to_hsv,
    lch_to_json,
    lch_from_json,
    lch_to_lab,
    pairwise_ciede2000,
    to_hex,
)
from .errors import ConfigurationError
from .naming import NameModel, name_difference

GAMMA1 = 0.1
GAMMA2 = 2.0
PD_THRESHOLD = 10.0

# Min-max normalization floors: worst-case hue deviation is 90 degrees per
# color, worst-case chroma-lightness deviation is sqrt(60^2 + 45^2) = 75.
HUE_FLOOR_PER_COLOR = 90.0
CL_FLOOR_PER_COLOR = 75.0
CL_ALLOWANCE = 15.0

# Analytic ceiling of E_D used for the normalized priority comparison when
# no run-calibrated value is available.
ANALYTIC_D_MAX = GAMMA1 * 100.0 + GAMMA2 * 1.0

ACHROMATIC_CHROMA = 10.0


@dataclass(frozen=True)
class Palette:
    """An ordered assignment of LCh colors to class ids."""

    classes: tuple[str, ...]
    colors: tuple[LchColor, ...]

    def __post_init__(self):
        classes = tuple(str(c) for c in self.classes)
        colors = tuple(
            LchColor(float(c[0]), float(c[1]), float(c[2]) % 360.0) for c in self.colors
        )
        if len(classes) != len(colors):
            raise ValueError("palette classes and colors differ in length")
        if not classes:
            raise ValueError("palette must not be empty")
        if len(set(classes)) != len(classes):
            raise ValueError("palette class ids must be unique")
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "colors", colors)

    def __len__(self):
        return len(self.classes)

    def lch_array(self) -> np.ndarray:
        return np.array(self.colors, dtype=float)

    def lab_array(self) -> np.ndarray:
        return lch_to_lab(self.lch_array())

    def hsv_hues(self) -> np.ndarray:
        return lch_to_hsv(self.lch_array())[:, 0]

    def color_of(self, class_id: str) -> LchColor:
        try:
            return self.colors[self.classes.index(class_id)]
        except ValueError:
            raise KeyError(f"no class {class_id!r} in palette") from None

    def with_colors(self, colors) -> "Palette":
        return Palette(self.classes, tuple(LchColor(*c) for c in colors))

    def to_json(self) -> list[dict]:
        return [
            {"class": cid, "color": lch_to_json(col), "hex": to_hex(col)}
            for cid, col in zip(self.classes, self.colors)
        ]

    @classmethod
    def from_json(cls, rows) -> "Palette":
        try:
            return cls(
                tuple(r["class"] for r in rows),
                tuple(lch_from_json(r["color"]) for r in rows),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed palette JSON: {exc}") from exc


@dataclass(frozen=True)
class HueTemplate:
    """A rotatable set of hue-wheel sectors; (center, width) in degrees.

    The achromatic template has no sectors and matches only palettes whose
    colors all have chroma below 10.
    """

    name: str
    sectors: tuple[tuple[float, float], ...]
    achromatic: bool = False

    def __post_init__(self):
        for center, width in self.sectors:
            if not (0.0 < width <= 360.0):
                raise ValueError(f"template {self.name}: width {width} out of (0, 360]")


DEFAULT_TEMPLATES = (
    HueTemplate("i", ((0.0, 18.0),)),
    HueTemplate("V", ((0.0, 93.6),)),
    HueTemplate("L", ((0.0, 18.0), (90.0, 79.2))),
    HueTemplate("I", ((0.0, 18.0), (180.0, 18.0))),
    HueTemplate("T", ((0.0, 180.0),)),
    HueTemplate("Y", ((0.0, 93.6), (180.0, 18.0))),
    HueTemplate("X", ((0.0, 93.6), (180.0, 93.6))),
    HueTemplate("N", (), achromatic=True),
)


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """All objective terms of one palette, raw and normalized."""

    e_pd: float
    e_nd: float
    e_d: float
    e_hue: float
    e_lc: float
    e_h: float
    e_sd: float
    normalized_d: float
    normalized_h: float
    normalized_sd: float

    def to_json(self) -> dict:
        return {k: float(getattr(self, k)) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, obj) -> "ObjectiveBreakdown":
        return cls(**{k: float(obj[k]) for k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class FitLine:
    """Total-least-squares line in the chroma-lightness plane.

    ``point`` is on the line, ``direction`` is a unit vector along it, and
    ``deviations`` holds each color's orthogonal distance to the line.
    """

    point: tuple[float, float]
    direction: tuple[float, float]
    deviations: np.ndarray = field(repr=False)

    @property
    def slope(self) -> Optional[float]:
        dx, dy = self.direction
        if abs(dx) < 1e-12:
            return None  # vertical line in the (C, L) plane
        return dy / dx

    @property
    def intercept(self) -> Optional[float]:
        s = self.slope
        if s is None:
            return None
        return self.point[1] - s * self.point[0]


def _circ(x):
    """Signed circular difference folded into [-180, 180)."""
    return (np.asarray(x, dtype=float) + 180.0) % 360.0 - 180.0


def perceptual_difference_score(p: Palette) -> float:
    """Min pairwise CIEDE2000 plus min(min - 10, 0) as the shortfall penalty."""
    if len(p) < 2:
        raise ValueError("perceptual difference needs at least two colors")
    d = pairwise_ciede2000(p.lab_array())
    iu = np.triu_indices(len(p), 1)
    dmin = float(np.min(d[iu]))
    return dmin + min(dmin - PD_THRESHOLD, 0.0)


def discriminability(
    p: Palette, model: NameModel, gamma1: float = GAMMA1, gamma2: float = GAMMA2
) -> float:
    return gamma1 * perceptual_difference_score(p) + gamma2 * name_difference(model, p)


def _sector_distance(phis, centers, halves):
    """Angular distance of each hue to the nearest sector, 0 inside."""
    d = np.abs(_circ(phis[..., None] - centers)) - halves
    return np.maximum(d, 0.0).min(axis=-1)


def template_rotation_candidates(thetas, template: HueTemplate) -> np.ndarray:
    """Rotations at which some hue sits exactly on a sector boundary.

    The rotation objective is piecewise linear; only boundary alignments
    can raise its slope, so its minimum over continuous rotation lies in
    this candidate set.
    """
    centers = np.array([c for c, _ in template.sectors])
    halves = np.array([w / 2.0 for _, w in template.sectors])
    cands = (
        centers[None, :, None]
        + np.array([-1.0, 1.0])[None, None, :] * halves[None, :, None]
        - np.asarray(thetas, dtype=float)[:, None, None]
    )
    return np.unique(cands.ravel() % 360.0)


def hue_difference(p: Palette, t: HueTemplate) -> float:
    """Smallest total angular deviation of the palette's HSV hues from the
    template, minimized over a continuous rotation of the template."""
    thetas = p.hsv_hues()
    chromas = p.lch_array()[:, 1]
    return _hue_difference_arrays(thetas, chromas, t)


def _hue_difference_arrays(thetas, chromas, t: HueTemplate) -> float:
    if t.achromatic:
        return 0.0 if np.all(chromas < ACHROMATIC_CHROMA) else math.inf
    centers = np.array([c for c, _ in t.sectors])
    halves = np.array([w / 2.0 for _, w in t.sectors])
    alphas = template_rotation_candidates(thetas, t)
    # g(alpha) = sum_i dist(theta_i + alpha); evaluate at every breakpoint.
    phis = np.asarray(thetas, dtype=float)[None, :] + alphas[:, None]
    totals = _sector_distance(phis, centers, halves).sum(axis=1)
    return float(np.min(totals))


def hue_harmony(p: Palette, templates=DEFAULT_TEMPLATES) -> float:
    """1 at a perfect template fit, 0 at the 90-degrees-per-color floor."""
    if not templates:
        raise ValueError("template list must not be empty")
    thetas = p.hsv_hues()
    chromas = p.lch_array()[:, 1]
    best = min(_hue_difference_arrays(thetas, chromas, t) for t in templates)
    if math.isinf(best):
        best = HUE_FLOOR_PER_COLOR * len(p)
    return float(np.clip(1.0 - best / (HUE_FLOOR_PER_COLOR * len(p)), 0.0, 1.0))


def cl_harmony(p: Palette) -> tuple[float, FitLine]:
    """Fit the TLS line to (C_i, L_i); deviations beyond 15 units cost."""
    pts = p.lch_array()[:, [1, 0]]  # (chroma, lightness)
    m = len(p)
    if m == 1:
        line = FitLine((float(pts[0, 0]), float(pts[0, 1])), (1.0, 0.0), np.zeros(1))
        return 1.0, line
    if m == 2:
        d = pts[1] - pts[0]
        n = np.linalg.norm(d)
        direction = (1.0, 0.0) if n < 1e-12 else (float(d[0] / n), float(d[1] / n))
        mid = pts.mean(axis=0)
        line = FitLine((float(mid[0]), float(mid[1])), direction, np.zeros(2))
        return 1.0, line
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = centered.T @ centered / m
    _, vecs = np.linalg.eigh(cov)
    direction = vecs[:, 1]  # largest eigenvalue: along the line
    normal = vecs[:, 0]
    dev = np.abs(centered @ normal)
    penalty = float(np.maximum(dev - CL_ALLOWANCE, 0.0).sum())
    e_lc = float(np.clip(1.0 - penalty / (CL_FLOOR_PER_COLOR * m), 0.0, 1.0))
    line = FitLine(
        (float(mean[0]), float(mean[1])),
        (float(direction[0]), float(direction[1])),
        dev,
    )
    return e_lc, line


# ---------------------------------------------------------------------------
# Pair harmony


class NullPairHarmony:
    """Plug-in scorer that rates every pair 0."""

    name = "null"

    def pair(self, x: LchColor, y: LchColor) -> float:
        return 0.0

    def matrix(self, lch: np.ndarray) -> np.ndarray:
        m = lch.shape[0]
        return np.zeros((m, m))


# Fixed flattening order of the coefficient config; the annealing engine
# receives exactly this vector.
COEFFICIENT_ORDER = (
    ("chromatic_difference", "base"),
    ("chromatic_difference", "amplitude"),
    ("chromatic_difference", "inner_base"),
    ("chromatic_difference", "inner_slope"),
    ("chromatic_difference", "hue_chroma_divisor"),
    ("lightness_sum", "base"),
    ("lightness_sum", "amplitude"),
    ("lightness_sum", "inner_base"),
    ("lightness_sum", "inner_slope"),
    ("lightness_difference", "base"),
    ("lightness_difference", "amplitude"),
    ("lightness_difference", "inner_base"),
    ("lightness_difference", "inner_slope"),
    ("hue_effect", "chroma_base"),
    ("hue_effect", "chroma_amplitude"),
    ("hue_effect", "chroma_inner_base"),
    ("hue_effect", "chroma_inner_slope"),
    ("hue_effect", "sin_base"),
    ("hue_effect", "sin1_amplitude"),
    ("hue_effect", "sin1_phase"),
    ("hue_effect", "sin2_amplitude"),
    ("hue_effect", "sin2_phase"),
    ("hue_effect", "lightness_slope"),
    ("hue_effect", "lightness_base"),
    ("hue_effect", "lightness_divisor"),
    ("hue_effect", "hue_center"),
    ("hue_effect", "hue_divisor"),
)


class TanhPairHarmony:
    """Two-color harmony model: chromatic-difference, lightness and hue
    effects combined through tanh saturations; coefficients from JSON."""

    name = "two-color-tanh"

    def __init__(self, config: dict):
        try:
            self.coefficients = np.array(
                [float(config[g][k]) for g, k in COEFFICIENT_ORDER]
            )
        except KeyError as exc:
            raise ConfigurationError(f"pair harmony config missing {exc}") from exc

    @classmethod
    def from_config(cls, path=None) -> "TanhPairHarmony":
        if path is None:
            ref = resources.files("hiercolor.data").joinpath("pair_harmony.json")
            with ref.open(encoding="utf-8") as fh:
                return cls(json.load(fh))
        with open(path, encoding="utf-8") as fh:
            try:
                return cls(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"invalid pair harmony JSON: {exc}") from exc

    def matrix(self, lch: np.ndarray) -> np.ndarray:
        L, C, h = lch[:, 0], lch[:, 1], lch[:, 2]
        k = self.coefficients
        lab = lch_to_lab(lch)
        dL = L[:, None] - L[None, :]
        dC = C[:, None] - C[None, :]
        dE2 = ((lab[:, None, :] - lab[None, :, :]) ** 2).sum(axis=2)
        dH = np.sqrt(np.maximum(dE2 - dL**2 - dC**2, 0.0))
        dC_comb = np.hypot(dH, dC / k[4])
        h_dc = k[0] + k[1] * np.tanh(k[2] + k[3] * dC_comb)
        h_lsum = k[5] + k[6] * np.tanh(k[7] + k[8] * (L[:, None] + L[None, :]))
        h_ldiff = k[9] + k[10] * np.tanh(k[11] + k[12] * np.abs(dL))
        hsy = self._hue_effect(L, C, h)
        return h_dc + h_lsum + h_ldiff + hsy[:, None] + hsy[None, :]

    def _hue_effect(self, L, C, h):
        k = self.coefficients
        ec = k[13] + k[14] * np.tanh(k[15] + k[16] * C)
        hs = (
            k[17]
            + k[18] * np.sin(np.radians(h + k[19]))
            + k[20] * np.sin(np.radians(2.0 * h + k[21]))
        )
        z = (k[25] - h) / k[26]
        ey = ((k[22] * L + k[23]) / k[24]) * np.exp(z - np.exp(z))
        return ec * (hs + ey)

    def pair(self, x: LchColor, y: LchColor) -> float:
        lch = np.array([x, y], dtype=float)
        return float(self.matrix(lch)[0, 1])


@lru_cache(maxsize=1)
def default_pair_scorer() -> TanhPairHarmony:
    return TanhPairHarmony.from_config()


def pair_harmony(x: LchColor, y: LchColor, scorer=None) -> float:
    scorer = scorer if scorer is not None else default_pair_scorer()
    return scorer.pair(x, y)


# ---------------------------------------------------------------------------
# Spatial distribution


def spatial_score(p: Palette, layout, mode: str, scorer=None, similarity=None) -> float:
    """Mean over samples and their neighbors of f(pair) / layout distance.

    Difference mode: f = D + P.  Similarity mode: f = -D*s + P, where s is
    the class similarity of the two samples' classes.  Same-class neighbor
    pairs contribute D = 0 plus the pair harmony of the identical pair.
    """
    if mode not in ("difference", "similarity"):
        raise ConfigurationError(f"unknown spatial mode {mode!r}")
    scorer = scorer if scorer is not None else default_pair_scorer()
    D = pairwise_ciede2000(p.lab_array())
    P = scorer.matrix(p.lch_array())
    if mode == "difference":
        F = D + P
    else:
        S = _similarity_matrix(p, layout, similarity)
        F = -D * S + P
    W = layout.pair_weights(p.classes)
    return float(np.sum(W * F))


def _similarity_matrix(p, layout, similarity):
    if similarity is None:
        from .hierarchy import class_similarity

        similarity = class_similarity(layout, p.classes)
    if hasattr(similarity, "aligned"):
        return similarity.aligned(p.classes)
    S = np.asarray(similarity, dtype=float)
    if S.shape != (len(p), len(p)):
        raise ConfigurationError("similarity matrix does not match palette size")
    return S


# ---------------------------------------------------------------------------
# Combination


@dataclass(frozen=True)
class ObjectiveContext:
    """Everything the scorers need, frozen once built.

    ``d_max`` is the E_D value mapped to normalized 1.0 in the priority
    comparison; the optimizer overrides the analytic default with the
    stage-1 converged value via ``calibrated`` (otherwise a palette can
    never satisfy E_D >= E_H on normalized terms).
    """

    name_model: NameModel
    templates: tuple[HueTemplate, ...] = DEFAULT_TEMPLATES
    pair_scorer: object = None
    layout: object = None
    mode: str = "difference"
    similarity: object = None
    gamma1: float = GAMMA1
    gamma2: float = GAMMA2
    d_max: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("difference", "similarity"):
            raise ConfigurationError(f"unknown spatial mode {self.mode!r}")
        if self.pair_scorer is None:
            object.__setattr__(self, "pair_scorer", default_pair_scorer())
        if self.mode == "similarity":
            if self.layout is None:
                raise ConfigurationError("similarity mode needs a layout")
            if self.similarity is None and getattr(self.layout, "features", None) is None:
                raise ConfigurationError(
                    "similarity mode needs per-sample features or an explicit matrix"
                )

    @property
    def effective_d_max(self) -> float:
        return ANALYTIC_D_MAX if self.d_max is None else self.d_max

    @property
    def sd_max(self) -> float:
        """Per-layout ceiling of E_SD: difference-mode bound at D = 100."""
        if self.layout is None:
            return 1.0
        return max(100.0 * self.layout.inverse_distance_mean(), 1e-12)

    def calibrated(self, d_max: float) -> "ObjectiveContext":
        return replace(self, d_max=max(float(d_max), 1e-9))


def total_objective(
    p: Palette, ctx: ObjectiveContext, alpha: float, beta: float
) -> tuple[float, ObjectiveBreakdown, bool]:
    """Eq. value = E_D + alpha*E_H + beta*E_SD plus the normalized chain check."""
    e_pd = perceptual_difference_score(p)
    e_nd = name_difference(ctx.name_model, p)
    e_d = ctx.gamma1 * e_pd + ctx.gamma2 * e_nd
    e_hue = hue_harmony(p, ctx.templates)
    e_lc, _ = cl_harmony(p)
    e_h = e_hue + e_lc
    if ctx.layout is not None:
        e_sd = spatial_score(p, ctx.layout, ctx.mode, ctx.pair_scorer, ctx.similarity)
        normalized_sd = float(np.clip(e_sd / ctx.sd_max, 0.0, 1.0))
    else:
        e_sd = 0.0
        normalized_sd = 0.0
    value = e_d + alpha * e_h + beta * e_sd
    breakdown = ObjectiveBreakdown(
        e_pd=e_pd,
        e_nd=e_nd,
        e_d=e_d,
        e_hue=e_hue,
        e_lc=e_lc,
        e_h=e_h,
        e_sd=e_sd,
        normalized_d=float(np.clip(e_d / ctx.effective_d_max, 0.0, 1.0)),
        normalized_h=float(np.clip(e_h / 2.0, 0.0, 1.0)),
        normalized_sd=normalized_sd,
    )
    priority_ok = (
        breakdown.normalized_d >= breakdown.normalized_h >= breakdown.normalized_sd
    )
    return value, breakdown, priority_ok
