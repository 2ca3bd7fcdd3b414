"""Evaluation metric tests.

The silhouette oracle is an independent textbook recomputation (explicit
a/b means per point); distance ratio is checked on constructed instances
where the ratios can be read off the geometry.
"""

import math

import numpy as np
import pytest

from hiercolor.colorspace import ciede2000, lch_to_lab, pairwise_ciede2000
from hiercolor.errors import ConfigurationError
from hiercolor.metrics import (
    EvaluationReport,
    bhdi,
    distance_ratio,
    evaluate,
    silhouette,
)
from hiercolor.naming import default_name_model
from hiercolor.objectives import ObjectiveContext, Palette
from hiercolor.ranges import default_range
from hiercolor.sampling import SamplerConfig, dart_throw

MODEL = default_name_model()


def naive_silhouette(lab, groups):
    """Textbook silhouette with CIEDE2000 distances, loops and all."""
    n = len(lab)
    out = []
    for i in range(n):
        same = [j for j in range(n) if j != i and groups[j] == groups[i]]
        if not same:
            out.append(0.0)
            continue
        a = np.mean([ciede2000(lab[i], lab[j]) for j in same])
        bs = []
        for g in set(groups):
            if g == groups[i]:
                continue
            members = [j for j in range(n) if groups[j] == g]
            bs.append(np.mean([ciede2000(lab[i], lab[j]) for j in members]))
        b = min(bs)
        denom = max(a, b)
        out.append(0.0 if denom == 0.0 else (b - a) / denom)
    return float(np.mean(out))


def palette_of(colors, prefix="c"):
    classes = tuple(f"{prefix}{i}" for i in range(len(colors)))
    return Palette(classes, tuple(tuple(map(float, c)) for c in colors))


class TestBhdi:
    def test_reference_row(self):
        assert bhdi(23.194, 0.921, 0.876, 0.955) == pytest.approx(5.992, abs=1e-3)

    def test_zeros(self):
        assert bhdi(0.0, 0.0, 0.0, 0.0) == 0.0

    def test_arithmetic(self):
        assert bhdi(10.0, 0.5, 0.5, 0.5) == pytest.approx(3.0, abs=1e-12)


class TestSilhouette:
    def test_matches_naive_recomputation(self):
        rng = np.random.default_rng(6)
        for trial in range(8):
            colors = dart_throw(
                default_range(), 9, SamplerConfig(min_distance=3.0, seed=40 + trial)
            )
            p = palette_of(colors)
            parent_of = {c: f"p{rng.integers(0, 3)}" for c in p.classes}
            while len(set(parent_of.values())) < 2:
                parent_of = {c: f"p{rng.integers(0, 3)}" for c in p.classes}
            groups = [parent_of[c] for c in p.classes]
            expected = naive_silhouette(p.lab_array(), groups)
            assert silhouette(p, parent_of) == pytest.approx(expected, abs=1e-9)

    def test_two_tight_far_groups(self):
        group_a = [(62.0, 48.0, 45.0), (63.0, 48.5, 47.0), (61.5, 47.5, 44.0)]
        group_b = [(46.0, 46.0, 320.0), (47.0, 46.5, 322.0), (45.5, 45.5, 318.0)]
        p = palette_of(group_a + group_b)
        parent_of = {f"c{i}": ("pa" if i < 3 else "pb") for i in range(6)}
        assert silhouette(p, parent_of) > 0.8

    def test_identical_colors_across_groups(self):
        c = (55.0, 50.0, 40.0)
        p = palette_of([c, c, c, c])
        parent_of = {"c0": "pa", "c1": "pa", "c2": "pb", "c3": "pb"}
        assert silhouette(p, parent_of) == 0.0

    def test_singleton_cluster_contributes_zero(self):
        group_a = [(62.0, 48.0, 45.0), (63.0, 48.5, 47.0)]
        lone = [(46.0, 46.0, 320.0)]
        p = palette_of(group_a + lone)
        parent_of = {"c0": "pa", "c1": "pa", "c2": "pb"}
        got = silhouette(p, parent_of)
        expected = naive_silhouette(p.lab_array(), ["pa", "pa", "pb"])
        assert got == pytest.approx(expected, abs=1e-9)

    def test_single_group_is_an_error(self):
        p = palette_of([(62.0, 48.0, 45.0), (63.0, 48.5, 47.0)])
        with pytest.raises(ValueError):
            silhouette(p, {"c0": "pa", "c1": "pa"})

    def test_missing_parent_is_an_error(self):
        p = palette_of([(62.0, 48.0, 45.0), (63.0, 48.5, 47.0)])
        with pytest.raises(ConfigurationError):
            silhouette(p, {"c0": "pa"})


class TestDistanceRatio:
    def test_own_parent_nearest_gives_one(self):
        parents = Palette(("pa", "pb"), ((62.0, 48.0, 45.0), (46.0, 46.0, 320.0)))
        children = palette_of([(63.0, 49.0, 46.0), (45.0, 45.0, 318.0)])
        parent_of = {"c0": "pa", "c1": "pb"}
        assert distance_ratio(children, parents, parent_of) == 1.0

    def test_foreign_parent_halves_the_ratio(self):
        # place one child so a foreign parent is at half its own-parent
        # distance; its contribution must be 0.5 within tolerance
        parents = Palette(("pa", "pb"), ((62.0, 48.0, 45.0), (46.0, 46.0, 320.0)))
        child = np.array([50.0, 47.0, 350.0])
        d_own = ciede2000(lch_to_lab(child), parents.lab_array()[0])
        d_other = ciede2000(lch_to_lab(child), parents.lab_array()[1])
        assert d_other < d_own  # geometry precondition for the construction
        children = palette_of([tuple(child)])
        got = distance_ratio(children, parents, {"c0": "pa"})
        assert got == pytest.approx(d_other / d_own, abs=1e-12)
        assert got < 1.0

    def test_coincident_child_contributes_one(self):
        parents = Palette(("pa", "pb"), ((62.0, 48.0, 45.0), (46.0, 46.0, 320.0)))
        children = palette_of([(62.0, 48.0, 45.0)])
        assert distance_ratio(children, parents, {"c0": "pa"}) == 1.0

    def test_empty_is_an_error(self):
        parents = Palette(("pa",), ((62.0, 48.0, 45.0),))
        with pytest.raises(ValueError):
            distance_ratio(Palette((), ()), parents, {})


class TestEvaluate:
    def test_flat_report(self):
        colors = dart_throw(default_range(), 6, SamplerConfig(seed=3))
        p = palette_of(colors)
        ctx = ObjectiveContext(name_model=MODEL)
        report = evaluate(p, ctx)
        assert report.ss is None and report.dr is None
        assert report.bhdi == pytest.approx(
            bhdi(report.pd, report.nd, report.hue, report.cl), abs=1e-12
        )
        # parts agree with the objective scorers they alias
        from hiercolor.objectives import (
            cl_harmony,
            hue_harmony,
            perceptual_difference_score,
        )
        from hiercolor.naming import name_difference

        assert report.pd == pytest.approx(perceptual_difference_score(p), abs=1e-12)
        assert report.nd == pytest.approx(name_difference(MODEL, p), abs=1e-12)
        assert report.hue == pytest.approx(hue_harmony(p, ctx.templates), abs=1e-12)
        assert report.cl == pytest.approx(cl_harmony(p)[0], abs=1e-12)

    def test_hierarchical_report(self):
        parents = Palette(("pa", "pb"), ((62.0, 48.0, 45.0), (46.0, 46.0, 320.0)))
        children = palette_of(
            [(63.0, 49.0, 46.0), (61.0, 47.0, 44.0), (45.0, 45.0, 318.0), (47.0, 47.0, 322.0)]
        )
        parent_of = {"c0": "pa", "c1": "pa", "c2": "pb", "c3": "pb"}
        ctx = ObjectiveContext(name_model=MODEL)
        report = evaluate(children, ctx, parents, parent_of)
        assert report.ss is not None and report.dr is not None
        assert -1.0 <= report.ss <= 1.0
        assert 0.0 < report.dr <= 1.0

    def test_json_round_trip(self):
        report = EvaluationReport(
            pd=23.194, nd=0.921, hue=0.876, cl=0.955, bhdi=5.9924, ss=0.5, dr=1.0
        )
        again = EvaluationReport.from_json(report.to_json())
        assert again == report
        flat = EvaluationReport(pd=1.0, nd=0.2, hue=0.3, cl=0.4, bhdi=0.5)
        again = EvaluationReport.from_json(flat.to_json())
        assert again == flat
        assert "ss" not in flat.to_json()

    def test_table_lists_all_columns(self):
        report = EvaluationReport(
            pd=23.194, nd=0.921, hue=0.876, cl=0.955, bhdi=5.9924, ss=0.5, dr=1.0
        )
        text = report.table()
        for name in ("PD", "ND", "Hue", "CL", "BHDI", "SS", "DR"):
            assert name in text
        header, values = text.splitlines()
        assert len(header) == len(values)
