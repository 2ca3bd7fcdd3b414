import math

import numpy as np
import pytest

from hiercolor.colorspace import LabColor, LchColor, lch_to_lab, pairwise_ciede2000
from hiercolor.errors import ConfigurationError, RangeEmptyError
from hiercolor.ranges import FeasibleRange, default_range
from hiercolor.sampling import SamplerConfig, capacity, dart_throw, fit_radius_law


def sphere_at(L, C, h, radius, hue_width=None):
    center = LabColor(*lch_to_lab(np.array([L, C, h])))
    w = hue_width if hue_width is not None else math.degrees(
        math.asin(min(1.0, radius / C))
    )
    return FeasibleRange(
        variant="sphere",
        center=center,
        radius=radius,
        hue_interval=((h - w) % 360.0, (h + w) % 360.0),
    )


def test_dart_throw_is_deterministic():
    cfg = SamplerConfig(seed=7)
    a = dart_throw(default_range(), 8, cfg)
    b = dart_throw(default_range(), 8, cfg)
    assert a == b
    c = dart_throw(default_range(), 8, SamplerConfig(seed=8))
    assert a != c


def test_dart_throw_respects_min_distance_and_membership():
    cfg = SamplerConfig(min_distance=10.0, seed=3)
    colors = dart_throw(default_range(), 10, cfg)
    assert len(colors) == 10
    assert all(isinstance(c, LchColor) for c in colors)
    arr = np.array(colors)
    assert default_range().contains_many(arr).all()
    d = pairwise_ciede2000(lch_to_lab(arr))
    iu = np.triu_indices(len(colors), 1)
    assert float(d[iu].min()) >= 10.0 - 1e-9


def test_dart_throw_prefix_stability():
    # a longer request extends the shorter one instead of reshuffling it
    cfg = SamplerConfig(seed=5)
    short = dart_throw(default_range(), 4, cfg)
    long = dart_throw(default_range(), 9, cfg)
    assert long[:4] == short


def test_single_point_range_yields_one_color():
    point = sphere_at(60.0, 50.0, 20.0, 0.0)
    cfg = SamplerConfig(min_distance=10.0, max_consecutive_rejections=50, seed=1)
    colors = dart_throw(point, 3, cfg)
    assert len(colors) == 1
    assert colors[0] == pytest.approx((60.0, 50.0, 20.0))
    assert capacity(point, cfg, trials=3) == 1.0


def test_empty_range_raises():
    # the hue interval sits wholly inside the disliked zone at these
    # lightness levels, so no proposal can ever be a member
    empty = sphere_at(60.0, 60.0, 100.0, 5.0, hue_width=5.0)
    cfg = SamplerConfig(seed=2, max_consecutive_rejections=10)
    with pytest.raises(RangeEmptyError):
        dart_throw(empty, 2, cfg)


def test_sampler_config_validation():
    with pytest.raises(ConfigurationError):
        SamplerConfig(min_distance=0.0)
    with pytest.raises(ConfigurationError):
        SamplerConfig(max_consecutive_rejections=0)
    with pytest.raises(ConfigurationError):
        dart_throw(default_range(), 0, SamplerConfig())


def test_capacity_is_deterministic_and_saturates():
    sphere = sphere_at(62.0, 60.0, 40.0, 12.0)
    cfg = SamplerConfig(min_distance=8.0, max_consecutive_rejections=200, seed=9)
    a = capacity(sphere, cfg, trials=5)
    b = capacity(sphere, cfg, trials=5)
    assert a == b
    assert a >= 1.0


def test_capacity_grows_with_radius():
    base = dict(min_distance=5.0, max_consecutive_rejections=300)
    small = sphere_at(62.0, 60.0, 40.0, 8.0)
    big = sphere_at(62.0, 60.0, 40.0, 16.0)
    cap_small = capacity(small, SamplerConfig(seed=4, **base), trials=5)
    cap_big = capacity(big, SamplerConfig(seed=4, **base), trials=5)
    assert cap_small >= 1.0
    ratio = cap_big / cap_small
    assert 2.0 <= ratio <= 8.0, f"ratio {ratio} out of plausible square-law band"


def test_fit_radius_law_exact_square_law():
    fit = fit_radius_law([(1.0, 2.0), (2.0, 8.0), (4.0, 32.0)])
    assert fit.exponent == pytest.approx(2.0, abs=1e-9)
    assert fit.scale == pytest.approx(2.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_radius_law_constant_capacity():
    fit = fit_radius_law([(1.0, 5.0), (2.0, 5.0), (4.0, 5.0)])
    assert fit.exponent == pytest.approx(0.0, abs=1e-9)
    assert fit.scale == pytest.approx(5.0, abs=1e-9)
    assert fit.r_squared == 1.0


def test_fit_radius_law_recovers_noisy_exponent():
    rng = np.random.default_rng(17)
    radii = np.array([5.0, 10.0, 15.0, 20.0, 25.0])
    caps = 3.0 * radii**2 * (1.0 + rng.uniform(-0.05, 0.05, radii.size))
    fit = fit_radius_law(list(zip(radii, caps)))
    assert 1.9 <= fit.exponent <= 2.1
    assert fit.r_squared > 0.98


def test_fit_radius_law_validation():
    with pytest.raises(ConfigurationError):
        fit_radius_law([(1.0, 2.0), (2.0, 8.0)])
    with pytest.raises(ConfigurationError):
        fit_radius_law([(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)])
    with pytest.raises(ConfigurationError):
        fit_radius_law([(0.0, 2.0), (2.0, 8.0), (4.0, 32.0)])
    with pytest.raises(ConfigurationError):
        fit_radius_law([(1.0, 0.0), (2.0, 8.0), (4.0, 32.0)])
