"""Palette evaluation: the individual scores, their combined index, and
the two hierarchy-alignment measures.

The combined index (BHDI) recomposes the objective terms with the same
weights the optimizer uses for discriminability, so one number tracks
both goals.  Hierarchy alignment is measured twice: silhouette score
(children clustered by parent, CIEDE2000 as the distance) for
compactness/separability, and distance ratio (nearest parent color over
own parent color) for assignment consistency.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .colorspace import cross_ciede2000, pairwise_ciede2000
from .errors import ConfigurationError
from .naming import name_difference
from .objectives import (
    GAMMA1,
    GAMMA2,
    ObjectiveContext,
    Palette,
    cl_harmony,
    hue_harmony,
    perceptual_difference_score,
)


@dataclass(frozen=True)
class EvaluationReport:
    """All palette scores; ss and dr stay None for flat evaluations."""

    pd: float
    nd: float
    hue: float
    cl: float
    bhdi: float
    ss: Optional[float] = None
    dr: Optional[float] = None

    def to_json(self) -> dict:
        out = {
            "pd": self.pd,
            "nd": self.nd,
            "hue": self.hue,
            "cl": self.cl,
            "bhdi": self.bhdi,
        }
        if self.ss is not None:
            out["ss"] = self.ss
        if self.dr is not None:
            out["dr"] = self.dr
        return out

    @classmethod
    def from_json(cls, obj) -> "EvaluationReport":
        return cls(
            pd=float(obj["pd"]),
            nd=float(obj["nd"]),
            hue=float(obj["hue"]),
            cl=float(obj["cl"]),
            bhdi=float(obj["bhdi"]),
            ss=float(obj["ss"]) if "ss" in obj else None,
            dr=float(obj["dr"]) if "dr" in obj else None,
        )

    def table(self) -> str:
        """Aligned-column text table of the report."""
        cols = [("PD", self.pd), ("ND", self.nd), ("Hue", self.hue),
                ("CL", self.cl), ("BHDI", self.bhdi)]
        if self.ss is not None:
            cols.append(("SS", self.ss))
        if self.dr is not None:
            cols.append(("DR", self.dr))
        header = "  ".join(f"{name:>8s}" for name, _ in cols)
        values = "  ".join(f"{value:8.3f}" for _, value in cols)
        return header + "\n" + values


def bhdi(pd: float, nd: float, hue: float, cl: float) -> float:
    """Combined index: discriminability weights on PD/ND plus the two
    harmony scores."""
    return GAMMA1 * pd + GAMMA2 * nd + hue + cl


def _groups(child_palette: Palette, parent_of) -> np.ndarray:
    try:
        parents = [parent_of[c] for c in child_palette.classes]
    except KeyError as exc:
        raise ConfigurationError(f"child {exc} has no parent assigned") from exc
    order = {p: i for i, p in enumerate(dict.fromkeys(parents))}
    return np.array([order[p] for p in parents], dtype=int)


def silhouette(child_palette: Palette, parent_of) -> float:
    """Mean silhouette of child colors clustered by parent class.

    Distance is CIEDE2000.  A child alone in its cluster contributes 0,
    and so does a child whose within- and between-cluster means tie.
    """
    if len(child_palette) == 0:
        raise ValueError("silhouette needs at least one child color")
    groups = _groups(child_palette, parent_of)
    n_groups = int(groups.max()) + 1
    if n_groups < 2:
        raise ValueError("silhouette is undefined with a single parent group")
    D = pairwise_ciede2000(child_palette.lab_array())
    n = len(child_palette)
    scores = np.zeros(n)
    for i in range(n):
        own = groups == groups[i]
        own_others = own.copy()
        own_others[i] = False
        if not own_others.any():
            scores[i] = 0.0  # singleton cluster
            continue
        a = D[i, own_others].mean()
        b = min(
            D[i, groups == g].mean() for g in range(n_groups) if g != groups[i]
        )
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


def distance_ratio(
    child_palette: Palette, parent_palette: Palette, parent_of
) -> float:
    """Mean over children of d(child, nearest parent) / d(child, own parent).

    1.0 means every child sits closest to its own parent's color; a child
    coincident with its parent contributes 1 regardless of the others.
    """
    if len(child_palette) == 0 or len(parent_palette) == 0:
        raise ValueError("distance ratio needs non-empty palettes")
    parent_index = {p: k for k, p in enumerate(parent_palette.classes)}
    try:
        own = [parent_index[parent_of[c]] for c in child_palette.classes]
    except KeyError as exc:
        raise ConfigurationError(
            f"no parent color for child parent {exc}"
        ) from exc
    D = cross_ciede2000(child_palette.lab_array(), parent_palette.lab_array())
    ratios = np.empty(len(child_palette))
    for i, own_idx in enumerate(own):
        own_d = D[i, own_idx]
        if own_d == 0.0:
            ratios[i] = 1.0
            continue
        ratios[i] = D[i].min() / own_d
    return float(ratios.mean())


def evaluate(
    palette: Palette,
    ctx: ObjectiveContext,
    parent_palette: Optional[Palette] = None,
    parent_of=None,
) -> EvaluationReport:
    """Score a palette; pass the parent palette and child-to-parent map to
    add the hierarchy-alignment fields."""
    pd = perceptual_difference_score(palette)
    nd = name_difference(ctx.name_model, palette)
    hue = hue_harmony(palette, ctx.templates)
    cl, _ = cl_harmony(palette)
    ss = None
    dr = None
    if parent_of is not None:
        ss = silhouette(palette, parent_of)
        if parent_palette is None:
            raise ConfigurationError(
                "distance ratio needs the parent palette as well"
            )
        dr = distance_ratio(palette, parent_palette, parent_of)
    return EvaluationReport(
        pd=pd, nd=nd, hue=hue, cl=cl, bhdi=bhdi(pd, nd, hue, cl), ss=ss, dr=dr
    )


def report_to_json_str(report: EvaluationReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True)
