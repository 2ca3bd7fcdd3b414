"""Rejection sampling of discernible colors and the radius capacity law.

dart_throw draws uniform proposals inside a feasible range and keeps each
one only if it stays at least min_distance (CIEDE2000) away from everything
kept so far.  The run stops after a fixed number of consecutive
min-distance rejections; how many colors survive at that point estimates
the capacity of the range.  Across sphere radii, capacity follows a power
law whose exponent fit_radius_law recovers from log-log least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .colorspace import LchColor, cross_ciede2000, lch_to_lab
from .errors import ConfigurationError, RangeEmptyError

_BATCH = 128
# Proposals that never even land inside the range do not count against the
# rejection budget, so an empty range needs its own stopping rule.
_EMPTY_RANGE_DRAWS = 200_000


@dataclass(frozen=True)
class SamplerConfig:
    min_distance: float = 10.0
    max_consecutive_rejections: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.min_distance <= 0:
            raise ConfigurationError("min_distance must be positive")
        if self.max_consecutive_rejections < 1:
            raise ConfigurationError("rejection budget must be >= 1")


def _propose(rng, bounds, n):
    (l_lo, l_hi), (c_lo, c_hi), (h_lo, h_hi) = bounds
    width = (h_hi - h_lo) % 360.0
    if width == 0.0 and h_lo != h_hi:
        width = 360.0
    L = rng.uniform(l_lo, l_hi, n) if l_hi > l_lo else np.full(n, l_lo)
    C = rng.uniform(c_lo, c_hi, n) if c_hi > c_lo else np.full(n, c_lo)
    if width > 0.0:
        h = (h_lo + rng.uniform(0.0, width, n)) % 360.0
    else:
        h = np.full(n, h_lo % 360.0)
    return np.stack([L, C, h], axis=-1)


def dart_throw(range_, k, cfg: SamplerConfig) -> list[LchColor]:
    """Sample up to k colors from range_, pairwise >= cfg.min_distance apart.

    Returns fewer than k colors when the rejection budget runs out first.
    Raises RangeEmptyError if no proposal ever lands inside the range.
    """
    if k is not None and k < 1:
        raise ConfigurationError("k must be >= 1")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    bounds = range_.sample_bounds()
    target = math.inf if k is None else int(k)

    kept_lch: list[np.ndarray] = []
    kept_lab: list[np.ndarray] = []
    rejections = 0
    barren_draws = 0

    while len(kept_lch) < target and rejections < cfg.max_consecutive_rejections:
        batch = _propose(rng, bounds, _BATCH)
        members = batch[range_.contains_many(batch)]
        if members.shape[0] == 0:
            barren_draws += _BATCH
            if not kept_lch and barren_draws >= _EMPTY_RANGE_DRAWS:
                raise RangeEmptyError("feasible range contains no colors")
            continue
        barren_draws = 0
        lab = lch_to_lab(members)
        # One vectorized distance pass against everything kept before this
        # batch; colors accepted within the batch are checked individually.
        if kept_lab:
            base = np.asarray(kept_lab)
            dmin = cross_ciede2000(lab, base).min(axis=1)
        else:
            dmin = np.full(members.shape[0], np.inf)
        new_in_batch: list[np.ndarray] = []
        for i in range(members.shape[0]):
            if len(kept_lch) >= target or rejections >= cfg.max_consecutive_rejections:
                break
            d = dmin[i]
            if d >= cfg.min_distance and new_in_batch:
                d = min(d, cross_ciede2000(lab[i][None, :], np.asarray(new_in_batch)).min())
            if d >= cfg.min_distance:
                kept_lch.append(members[i])
                kept_lab.append(lab[i])
                new_in_batch.append(lab[i])
                rejections = 0
            else:
                rejections += 1

    if not kept_lch:
        raise RangeEmptyError("feasible range contains no colors")
    return [LchColor(float(p[0]), float(p[1]), float(p[2])) for p in kept_lch]


def capacity(range_, cfg: SamplerConfig, trials: int = 20) -> float:
    """Median saturation count over independent seeded dart-throw trials."""
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    seeds = np.random.SeedSequence(cfg.seed).spawn(trials)
    counts = []
    for s in seeds:
        trial_cfg = SamplerConfig(
            min_distance=cfg.min_distance,
            max_consecutive_rejections=cfg.max_consecutive_rejections,
            seed=int(s.generate_state(1)[0]),
        )
        counts.append(len(dart_throw(range_, None, trial_cfg)))
    return float(np.median(counts))


@dataclass(frozen=True)
class RadiusLawFit:
    exponent: float
    scale: float
    r_squared: float


def fit_radius_law(samples) -> RadiusLawFit:
    """Least-squares fit of capacity = scale * radius**exponent in log-log."""
    pts = [(float(r), float(c)) for r, c in samples]
    if len({r for r, _ in pts}) < 3:
        raise ConfigurationError("radius law fit needs at least 3 distinct radii")
    if any(r <= 0 for r, _ in pts):
        raise ConfigurationError("radii must be positive")
    if any(c <= 0 for _, c in pts):
        raise ConfigurationError("capacities must be positive")
    x = np.log(np.array([r for r, _ in pts]))
    y = np.log(np.array([c for _, c in pts]))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot <= 1e-15 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RadiusLawFit(float(slope), float(math.exp(intercept)), r2)
