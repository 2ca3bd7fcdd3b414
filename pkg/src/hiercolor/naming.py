"""Color-name statistics: name vectors and the name-difference term.

A name model is a term list plus a binned CIELab grid; each bin carries a
count vector saying how often each term was used for colors in that bin.
The name difference of a palette is the mean pairwise cosine distance of
the name vectors of its colors, which rewards palettes whose colors people
would describe with different words even when they are metrically close.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from .colorspace import lch_to_lab
from .errors import ConfigurationError


@dataclass(frozen=True)
class NameModel:
    """Term list, Lab bin centers and the (bins x terms) count matrix."""

    terms: tuple[str, ...]
    bins_lab: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    @property
    def term_count(self) -> int:
        return len(self.terms)

    @property
    def bin_count(self) -> int:
        return self.bins_lab.shape[0]

    @cached_property
    def unit_counts(self) -> np.ndarray:
        """Count rows scaled to unit L2 norm, so cosine is a plain dot."""
        norms = np.linalg.norm(self.counts, axis=1, keepdims=True)
        return self.counts / norms

    @cached_property
    def bin_cosine(self) -> np.ndarray:
        """(bins x bins) cosine-similarity table between bin count rows."""
        u = self.unit_counts
        return np.clip(u @ u.T, 0.0, 1.0)


def _fail(msg):
    raise ConfigurationError(f"name model: {msg}")


def load_name_model(source) -> NameModel:
    """Load a name model from a path, file object or already-parsed dict.

    The file layout is ``{"terms": [...], "bins": [[L, a, b], ...],
    "counts": [[bin_index, term_index, count], ...]}`` with counts stored
    as sparse triplets.  Indices out of range, negative counts, duplicate
    triplets and bins with no counts at all are rejected.
    """
    if isinstance(source, (str, Path)):
        try:
            with open(source, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            _fail(f"cannot read {source}: {exc}")
        except json.JSONDecodeError as exc:
            _fail(f"invalid JSON in {source}: {exc}")
    elif hasattr(source, "read"):
        try:
            raw = json.load(source)
        except json.JSONDecodeError as exc:
            _fail(f"invalid JSON: {exc}")
    elif isinstance(source, dict):
        raw = source
    else:
        _fail(f"unsupported source {type(source).__name__}")

    for key in ("terms", "bins", "counts"):
        if key not in raw:
            _fail(f"missing key {key!r}")

    terms = tuple(str(t) for t in raw["terms"])
    if not terms:
        _fail("empty term list")
    if len(set(terms)) != len(terms):
        _fail("duplicate terms")

    bins_lab = np.asarray(raw["bins"], dtype=float)
    if bins_lab.ndim != 2 or bins_lab.shape[1] != 3 or bins_lab.shape[0] == 0:
        _fail("bins must be a non-empty list of [L, a, b] rows")

    counts = np.zeros((bins_lab.shape[0], len(terms)))
    seen = set()
    for i, triplet in enumerate(raw["counts"]):
        try:
            b, t, c = triplet
        except (TypeError, ValueError):
            _fail(f"counts[{i}] is not a [bin, term, count] triplet")
        b, t, c = int(b), int(t), float(c)
        if not (0 <= b < bins_lab.shape[0]):
            _fail(f"counts[{i}]: bin index {b} out of range")
        if not (0 <= t < len(terms)):
            _fail(f"counts[{i}]: term index {t} out of range")
        if c < 0:
            _fail(f"counts[{i}]: negative count {c}")
        if (b, t) in seen:
            _fail(f"counts[{i}]: duplicate entry for bin {b}, term {t}")
        seen.add((b, t))
        counts[b, t] = c

    empty = np.flatnonzero(counts.sum(axis=1) == 0)
    if empty.size:
        _fail(f"bin {empty[0]} has no counts")

    return NameModel(terms=terms, bins_lab=bins_lab, counts=counts)


def default_name_model() -> NameModel:
    """The model shipped with the package (see tools/make_name_model.py)."""
    ref = resources.files("hiercolor.data").joinpath("name_model.json")
    with ref.open(encoding="utf-8") as fh:
        return load_name_model(fh)


def _as_lab_rows(colors) -> np.ndarray:
    if hasattr(colors, "lab_array"):
        return colors.lab_array()
    arr = np.asarray(colors, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("expected an (m, 3) array of Lab rows or a palette")
    return arr


def bin_index(model: NameModel, lab) -> np.ndarray:
    """Nearest-bin index for each Lab row; distance ties pick the lowest."""
    lab = _as_lab_rows(lab)
    d2 = ((lab[:, None, :] - model.bins_lab[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def name_vector(model: NameModel, color) -> np.ndarray:
    """The count row of the bin nearest to the given color.

    Accepts a Lab triple or an LchColor.
    """
    arr = np.asarray(color, dtype=float)
    if hasattr(color, "h"):  # LchColor
        arr = lch_to_lab(arr)
    idx = bin_index(model, arr[None, :] if arr.ndim == 1 else arr)
    row = model.counts[idx]
    return row[0].copy() if arr.ndim == 1 else row.copy()


def name_difference(model: NameModel, colors) -> float:
    """Mean pairwise cosine distance of the palette's name vectors.

    Needs at least two colors; always in [0, 1] because counts are
    non-negative.
    """
    lab = _as_lab_rows(colors)
    m = lab.shape[0]
    if m < 2:
        raise ValueError("name difference needs at least two colors")
    idx = bin_index(model, lab)
    cos = model.bin_cosine[np.ix_(idx, idx)]
    iu = np.triu_indices(m, 1)
    return float(np.mean(1.0 - cos[iu]))
