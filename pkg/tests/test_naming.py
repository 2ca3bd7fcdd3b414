"""Name model loading, lookup semantics and the name-difference term."""

import io
import json

import numpy as np
import pytest

from hiercolor.colorspace import LchColor, lab_to_lch
from hiercolor.errors import ConfigurationError
from hiercolor.naming import (
    bin_index,
    default_name_model,
    load_name_model,
    name_difference,
    name_vector,
)


def tiny_model(counts=None):
    """Three bins on the L axis, three terms, hand-set counts."""
    if counts is None:
        counts = [[0, 0, 10.0], [1, 1, 10.0], [2, 2, 10.0]]
    return {
        "terms": ["dark", "mid", "light"],
        "bins": [[20.0, 0.0, 0.0], [50.0, 0.0, 0.0], [80.0, 0.0, 0.0]],
        "counts": counts,
    }


def test_load_and_shape():
    model = load_name_model(tiny_model())
    assert model.term_count == 3
    assert model.bin_count == 3
    assert model.counts.shape == (3, 3)
    assert model.counts[1, 1] == 10.0
    # File-object form parses the same.
    fh = io.StringIO(json.dumps(tiny_model()))
    model2 = load_name_model(fh)
    assert np.array_equal(model.counts, model2.counts)


def test_load_rejects_bad_files():
    with pytest.raises(ConfigurationError, match="missing key"):
        load_name_model({"terms": ["a"], "bins": [[0, 0, 0]]})
    with pytest.raises(ConfigurationError, match="out of range"):
        load_name_model(tiny_model(counts=[[0, 0, 1], [3, 1, 1], [1, 1, 1], [2, 2, 1]]))
    with pytest.raises(ConfigurationError, match="negative"):
        load_name_model(tiny_model(counts=[[0, 0, -1], [1, 1, 1], [2, 2, 1]]))
    with pytest.raises(ConfigurationError, match="duplicate entry"):
        load_name_model(
            tiny_model(counts=[[0, 0, 1], [0, 0, 2], [1, 1, 1], [2, 2, 1]])
        )
    with pytest.raises(ConfigurationError, match="has no counts"):
        load_name_model(tiny_model(counts=[[0, 0, 1], [1, 1, 1]]))
    with pytest.raises(ConfigurationError, match="duplicate terms"):
        bad = tiny_model()
        bad["terms"] = ["a", "a", "b"]
        load_name_model(bad)
    with pytest.raises(ConfigurationError, match="invalid JSON"):
        load_name_model(io.StringIO("{not json"))
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_name_model("/nonexistent/path.json")


def test_nearest_bin_and_tie_break():
    model = load_name_model(tiny_model())
    idx = bin_index(model, np.array([[22.0, 0.0, 0.0], [79.0, 1.0, 0.0]]))
    assert idx.tolist() == [0, 2]
    # (35, 0, 0) is exactly equidistant from bins 0 and 1: lowest index wins.
    idx = bin_index(model, np.array([[35.0, 0.0, 0.0]]))
    assert idx.tolist() == [0]


def test_name_vector_lookup():
    model = load_name_model(tiny_model())
    v = name_vector(model, (21.0, 0.0, 0.0))
    assert v.tolist() == [10.0, 0.0, 0.0]
    # LchColor input goes through Lab.
    v2 = name_vector(model, LchColor(81.0, 0.0, 0.0))
    assert v2.tolist() == [0.0, 0.0, 10.0]
    # Mutating the returned vector must not corrupt the model.
    v[0] = -1
    assert model.counts[0, 0] == 10.0


def test_name_difference_orthogonal_and_identical():
    model = load_name_model(tiny_model())
    # Disjoint term usage: cosine 0, distance 1 for every pair.
    labs = np.array([[20.0, 0.0, 0.0], [50.0, 0.0, 0.0], [80.0, 0.0, 0.0]])
    assert name_difference(model, labs) == pytest.approx(1.0)
    # Same bin twice: cosine 1, distance 0.
    labs = np.array([[20.0, 0.0, 0.0], [21.0, 0.0, 0.0]])
    assert name_difference(model, labs) == pytest.approx(0.0)


def test_name_difference_hand_computed_mixture():
    # Bins sharing one term: cos = 10*10 / (sqrt(200)*sqrt(200)) = 0.5.
    model = load_name_model(
        {
            "terms": ["a", "b", "c"],
            "bins": [[20.0, 0.0, 0.0], [80.0, 0.0, 0.0]],
            "counts": [[0, 0, 10.0], [0, 1, 10.0], [1, 1, 10.0], [1, 2, 10.0]],
        }
    )
    labs = np.array([[20.0, 0.0, 0.0], [80.0, 0.0, 0.0]])
    assert name_difference(model, labs) == pytest.approx(0.5)


def test_name_difference_mean_over_pairs():
    model = load_name_model(tiny_model())
    # Two in bin 0, one in bin 2: pairs (0,1)=0, (0,2)=1, (1,2)=1 -> 2/3.
    labs = np.array([[20.0, 0.0, 0.0], [21.0, 0.0, 0.0], [80.0, 0.0, 0.0]])
    assert name_difference(model, labs) == pytest.approx(2.0 / 3.0)


def test_name_difference_needs_two_colors():
    model = load_name_model(tiny_model())
    with pytest.raises(ValueError, match="two colors"):
        name_difference(model, np.array([[20.0, 0.0, 0.0]]))


def test_name_difference_range_property():
    model = default_name_model()
    rng = np.random.default_rng(42)
    for _ in range(50):
        m = rng.integers(2, 12)
        labs = rng.uniform((20, -60, -60), (90, 60, 60), size=(m, 3))
        d = name_difference(model, labs)
        assert 0.0 <= d <= 1.0


def test_default_model_shape():
    model = default_name_model()
    assert model.term_count == 153
    assert model.bin_count == 512
    assert model.bin_cosine.shape == (512, 512)
    assert np.allclose(np.diag(model.bin_cosine), 1.0)
    # Saturated greens and far-apart colors should read as differently named.
    red = np.array([[53.24, 80.09, 67.20]])
    green = np.array([[87.73, -86.18, 83.18]])
    same = name_difference(model, np.vstack([red, red]))
    diff = name_difference(model, np.vstack([red, green]))
    assert same == pytest.approx(0.0)
    assert diff > 0.5


def test_bin_consistency_between_lookup_paths():
    model = default_name_model()
    rng = np.random.default_rng(4)
    labs = rng.uniform((10, -70, -70), (95, 70, 70), size=(40, 3))
    idx = bin_index(model, labs)
    rows = name_vector(model, labs)
    assert np.array_equal(rows, model.counts[idx])
    lchs = lab_to_lch(labs)
    for k in range(40):
        v = name_vector(model, LchColor(*lchs[k]))
        assert np.allclose(v, model.counts[idx[k]])
