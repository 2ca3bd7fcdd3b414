"""Shared fixtures: small name models, layout builders, naive oracles."""

import numpy as np
import pytest

from hiercolor.colorspace import LchColor, ciede2000
from hiercolor.hierarchy import SpatialLayout, build_neighbor_graph
from hiercolor.naming import load_name_model
from hiercolor.objectives import Palette


@pytest.fixture(scope="session")
def small_model():
    """Five well-separated bins, one term each: easy to reason about."""
    return load_name_model(
        {
            "terms": ["t0", "t1", "t2", "t3", "t4"],
            "bins": [
                [20.0, 0.0, 0.0],
                [45.0, 40.0, 0.0],
                [60.0, -40.0, 20.0],
                [75.0, 0.0, -40.0],
                [90.0, 0.0, 40.0],
            ],
            "counts": [[i, i, 10.0] for i in range(5)],
        }
    )


@pytest.fixture(scope="session")
def default_model():
    from hiercolor.naming import default_name_model

    return default_name_model()


def random_palette(rng, m, chroma=(20.0, 80.0), light=(30.0, 90.0)):
    cols = [
        LchColor(rng.uniform(*light), rng.uniform(*chroma), rng.uniform(0, 360))
        for _ in range(m)
    ]
    return Palette(tuple(f"c{i}" for i in range(m)), tuple(cols))


def make_scatter(rng, n, classes, with_features=False):
    feats = rng.random((n, 4)) if with_features else None
    layout = SpatialLayout(
        kind="scatter",
        ids=tuple(f"s{i}" for i in range(n)),
        positions=rng.uniform(0, 100, size=(n, 2)),
        labels=tuple(rng.choice(classes) for _ in range(n)),
        features=feats,
    )
    return build_neighbor_graph(layout)


def make_grid(rng, rows, cols, classes, with_features=False):
    n = rows * cols
    pos = np.array([[r, c] for r in range(rows) for c in range(cols)], dtype=float)
    feats = rng.random((n, 4)) if with_features else None
    layout = SpatialLayout(
        kind="grid",
        ids=tuple(f"g{i}" for i in range(n)),
        positions=pos,
        labels=tuple(rng.choice(classes) for _ in range(n)),
        features=feats,
    )
    return build_neighbor_graph(layout)


def naive_spatial(palette, layout, mode, scorer, sim=None):
    """Double-loop recomputation of the spatial term, straight off Eq. 7."""
    labs = palette.lab_array()
    idx = {c: k for k, c in enumerate(palette.classes)}
    n = layout.sample_count
    total = 0.0
    for i in range(n):
        nbrs = layout.neighbors[i]
        if nbrs.size == 0:
            continue
        acc = 0.0
        for j, d in zip(nbrs, layout.distances[i]):
            a, b = idx[layout.labels[i]], idx[layout.labels[int(j)]]
            D = ciede2000(labs[a], labs[b])
            P = scorer.pair(palette.colors[a], palette.colors[b])
            if mode == "difference":
                f = D + P
            else:
                f = -D * sim[a, b] + P
            acc += f / d
        total += acc / nbrs.size
    return total / n
