"""Hierarchy and layout ingestion: trees, neighbor graphs, class similarity.

Hierarchies are JSON trees {"id", "label", "children": [...]}.  Layouts
carry one sample per visual mark: grid cells, scatter points or
parallel-coordinate polylines; the neighbor graph definition follows the
visualization kind (Moore-8 for grids, 8-nearest-neighbor otherwise).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigurationError, HierarchyError

KNN_K = 8
DISTANCE_FLOOR = 1e-6

LAYOUT_KINDS = ("grid", "scatter", "parallel-coordinates")


@dataclass
class HierarchyNode:
    id: str
    label: str
    children: list["HierarchyNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def leaf_count(self) -> int:
        if self.is_leaf:
            return 1
        return sum(c.leaf_count for c in self.children)

    @property
    def node_count(self) -> int:
        return 1 + sum(c.node_count for c in self.children)

    def find(self, node_id: str) -> Optional["HierarchyNode"]:
        if self.id == node_id:
            return self
        for c in self.children:
            hit = c.find(node_id)
            if hit is not None:
                return hit
        return None

    def parent_map(self) -> dict[str, Optional[str]]:
        """node id -> parent id (None for the root)."""
        out = {self.id: None}

        def walk(node):
            for c in node.children:
                out[c.id] = node.id
                walk(c)

        walk(self)
        return out

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "children": [c.to_json() for c in self.children],
        }


def load_hierarchy(source) -> HierarchyNode:
    """Parse and validate a hierarchy tree.

    Accepts a path, a file object or a parsed dict.  Ids must be unique
    tree-wide; shared/cyclic node objects are rejected.
    """
    raw = _read_json(source, "hierarchy")
    seen_ids: set[str] = set()
    seen_objs: set[int] = set()

    def build(obj, path):
        if not isinstance(obj, dict):
            raise HierarchyError(f"hierarchy: {path}: expected an object")
        if id(obj) in seen_objs:
            raise HierarchyError(f"hierarchy: {path}: cycle detected")
        seen_objs.add(id(obj))
        if "id" not in obj:
            raise HierarchyError(f"hierarchy: {path}: missing 'id'")
        node_id = str(obj["id"])
        if node_id in seen_ids:
            raise HierarchyError(f"hierarchy: {path}: duplicate id {node_id!r}")
        seen_ids.add(node_id)
        label = str(obj.get("label", node_id))
        children_raw = obj.get("children", [])
        if not isinstance(children_raw, list):
            raise HierarchyError(f"hierarchy: {path}.children: expected a list")
        children = [
            build(c, f"{path}.children[{i}]") for i, c in enumerate(children_raw)
        ]
        return HierarchyNode(node_id, label, children)

    return build(raw, "$")


def _read_json(source, what):
    if isinstance(source, (str, Path)):
        try:
            with open(source, encoding="utf-8") as fh:
                return json.load(fh)
        except OSError as exc:
            raise HierarchyError(f"{what}: cannot read {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise HierarchyError(f"{what}: invalid JSON in {source}: {exc}") from exc
    if hasattr(source, "read"):
        try:
            return json.load(source)
        except json.JSONDecodeError as exc:
            raise HierarchyError(f"{what}: invalid JSON: {exc}") from exc
    if isinstance(source, (dict, list)):
        return source
    raise HierarchyError(f"{what}: unsupported source {type(source).__name__}")


@dataclass
class SpatialLayout:
    """Samples of a visualization plus the neighbor graph built over them.

    ``positions`` is an (n, 2) array for grids (row, col) and scatter
    (x, y), or (n, axes) for parallel coordinates.  ``neighbors`` and
    ``distances`` are parallel lists of arrays, filled by
    build_neighbor_graph.
    """

    kind: str
    ids: tuple[str, ...]
    positions: np.ndarray
    labels: tuple[str, ...]
    features: Optional[np.ndarray] = None
    neighbors: Optional[list[np.ndarray]] = None
    distances: Optional[list[np.ndarray]] = None

    def __post_init__(self):
        if self.kind not in LAYOUT_KINDS:
            raise ConfigurationError(
                f"layout kind {self.kind!r} not one of {LAYOUT_KINDS}"
            )
        if len(self.ids) != len(self.labels) or len(self.ids) != len(self.positions):
            raise ConfigurationError("layout ids/labels/positions lengths differ")
        self._weights_cache: dict[tuple[str, ...], np.ndarray] = {}

    @property
    def sample_count(self) -> int:
        return len(self.ids)

    def _require_graph(self):
        if self.neighbors is None:
            raise ConfigurationError("neighbor graph not built; call build_neighbor_graph")

    def inverse_distance_mean(self) -> float:
        """Mean over samples of the mean inverse neighbor distance."""
        self._require_graph()
        n = self.sample_count
        if n == 0:
            return 0.0
        acc = 0.0
        for d in self.distances:
            if d.size:
                acc += float(np.mean(1.0 / d))
        return acc / n

    def pair_weights(self, classes: tuple[str, ...]) -> np.ndarray:
        """(m, m) matrix W with E_SD = sum(W * F) for any pair score F.

        W[a, b] accumulates 1 / (n_samples * |neighbors| * distance) over
        every directed neighbor pair whose endpoint classes are (a, b); it
        linearizes the mean-over-samples, mean-over-neighbors double loop.
        """
        self._require_graph()
        key = tuple(classes)
        cached = self._weights_cache.get(key)
        if cached is not None:
            return cached
        index = {c: k for k, c in enumerate(key)}
        m = len(key)
        labels_idx = np.empty(self.sample_count, dtype=int)
        for i, lbl in enumerate(self.labels):
            if lbl not in index:
                raise ConfigurationError(
                    f"layout label {lbl!r} is not a palette class"
                )
            labels_idx[i] = index[lbl]
        W = np.zeros((m, m))
        n = self.sample_count
        for i in range(n):
            nbrs = self.neighbors[i]
            if nbrs.size == 0:
                continue
            w = 1.0 / (n * nbrs.size * self.distances[i])
            np.add.at(W, (labels_idx[i], labels_idx[nbrs]), w)
        self._weights_cache[key] = W
        return W


def load_layout(source) -> SpatialLayout:
    """Parse a layout file and build its neighbor graph.

    Schema: {"kind", "samples": [{"id", "pos", "label", "features"?}]};
    grid pos = [row, col], scatter pos = [x, y], parallel coordinates
    pos = per-axis value list.
    """
    raw = _read_json(source, "layout")
    if not isinstance(raw, dict) or "kind" not in raw or "samples" not in raw:
        raise HierarchyError("layout: expected {'kind', 'samples'}")
    kind = raw["kind"]
    samples = raw["samples"]
    if not isinstance(samples, list):
        raise HierarchyError("layout: samples must be a list")
    ids, poss, labels, feats = [], [], [], []
    for i, s in enumerate(samples):
        if not isinstance(s, dict):
            raise HierarchyError(f"layout: samples[{i}]: expected an object")
        for k in ("id", "pos", "label"):
            if k not in s:
                raise HierarchyError(f"layout: samples[{i}]: missing {k!r}")
        ids.append(str(s["id"]))
        poss.append([float(v) for v in s["pos"]])
        labels.append(str(s["label"]))
        feats.append(s.get("features"))
    if len(set(ids)) != len(ids):
        raise HierarchyError("layout: duplicate sample ids")
    lengths = {len(p) for p in poss}
    if len(lengths) > 1:
        raise HierarchyError("layout: inconsistent pos lengths")
    features = None
    if any(f is not None for f in feats):
        if any(f is None for f in feats):
            raise HierarchyError("layout: features must be present on all samples or none")
        widths = {len(f) for f in feats}
        if len(widths) > 1:
            raise HierarchyError("layout: inconsistent feature lengths")
        features = np.asarray(feats, dtype=float)
    layout = SpatialLayout(
        kind=kind,
        ids=tuple(ids),
        positions=np.asarray(poss, dtype=float),
        labels=tuple(labels),
        features=features,
    )
    return build_neighbor_graph(layout)


def build_neighbor_graph(layout: SpatialLayout) -> SpatialLayout:
    """Fill in neighbors and strictly positive distances.

    grid: the eight surrounding cells, Euclidean cell-center distance;
    scatter: eight nearest by Euclidean distance; parallel coordinates:
    eight nearest by mean per-axis vertical gap.
    """
    n = layout.sample_count
    if n < 2:
        layout.neighbors = [np.empty(0, dtype=int) for _ in range(n)]
        layout.distances = [np.empty(0) for _ in range(n)]
        return layout

    if layout.kind == "grid":
        cells: dict[tuple[int, int], list[int]] = {}
        coords = np.rint(layout.positions).astype(int)
        for i, (r, c) in enumerate(coords):
            cells.setdefault((int(r), int(c)), []).append(i)
        neighbors, distances = [], []
        for i, (r, c) in enumerate(coords):
            nbrs = []
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr == 0 and dc == 0:
                        continue
                    nbrs.extend(cells.get((r + dr, c + dc), ()))
            nbrs = np.array(sorted(nbrs), dtype=int)
            d = np.hypot(*(coords[nbrs] - coords[i]).T) if nbrs.size else np.empty(0)
            neighbors.append(nbrs)
            distances.append(np.maximum(d, DISTANCE_FLOOR))
    else:
        if layout.kind == "scatter":
            diff = layout.positions[:, None, :] - layout.positions[None, :, :]
            dmat = np.sqrt((diff**2).sum(axis=2))
        else:  # parallel-coordinates: mean vertical gap across axes
            diff = layout.positions[:, None, :] - layout.positions[None, :, :]
            dmat = np.abs(diff).mean(axis=2)
        neighbors, distances = [], []
        k = min(KNN_K, n - 1)
        for i in range(n):
            row = dmat[i].copy()
            row[i] = np.inf
            order = np.argsort(row, kind="stable")[:k]
            neighbors.append(order.astype(int))
            distances.append(np.maximum(row[order], DISTANCE_FLOOR))

    layout.neighbors = neighbors
    layout.distances = distances
    return layout


@dataclass(frozen=True)
class ClassSimilarity:
    """Cosine similarity (clamped to [0,1]) between class-mean features."""

    classes: tuple[str, ...]
    means: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    def aligned(self, classes: tuple[str, ...]) -> np.ndarray:
        idx = [self.classes.index(c) for c in classes]
        return self.matrix[np.ix_(idx, idx)]


def class_similarity(layout: SpatialLayout, visible_classes) -> ClassSimilarity:
    """Per-class mean feature vectors and their pairwise cosine similarity."""
    classes = tuple(visible_classes)
    if layout.features is None:
        raise ConfigurationError("similarity requested but layout has no features")
    means = []
    for c in classes:
        rows = [i for i, lbl in enumerate(layout.labels) if lbl == c]
        if not rows:
            raise ConfigurationError(f"no samples labeled {c!r} in layout")
        means.append(layout.features[rows].mean(axis=0))
    means = np.asarray(means)
    norms = np.linalg.norm(means, axis=1)
    safe = np.where(norms == 0, 1.0, norms)
    unit = means / safe[:, None]
    mat = np.clip(unit @ unit.T, 0.0, 1.0)
    np.fill_diagonal(mat, 1.0)
    return ClassSimilarity(classes=classes, means=means, matrix=mat)
