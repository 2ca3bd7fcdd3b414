"""Dynamic color assignment for class hierarchies.

The package assigns discriminable, harmonic colors to the visible classes
of a hierarchy, carves per-parent feasible sub-ranges out of CIELab space
when a class is expanded, and scores the results.

Typical entry points: :class:`Session` for the interactive exploration
loop (top-level palette, node expansion, evaluation, event-log replay),
:func:`optimize` for one-shot palette optimization, :func:`evaluate` for
palette meters, and :func:`hiercolor.service.create_app` for the REST
service behind the browser explorer.
"""

from .colorspace import (
    HsvColor,
    LabColor,
    LchColor,
    RgbColor,
    ciede2000,
    convert,
    in_gamut,
    to_hex,
)
from .errors import (
    ConfigurationError,
    ExpansionError,
    HierarchyError,
    NotFoundError,
    RangeCapacityWarning,
    RangeEmptyError,
)
from .hierarchy import (
    HierarchyNode,
    SpatialLayout,
    build_neighbor_graph,
    load_hierarchy,
    load_layout,
)
from .metrics import EvaluationReport, bhdi, distance_ratio, evaluate, silhouette
from .naming import NameModel, default_name_model, load_name_model
from .objectives import (
    HueTemplate,
    ObjectiveContext,
    Palette,
    cl_harmony,
    discriminability,
    hue_difference,
    hue_harmony,
    pair_harmony,
    perceptual_difference_score,
    spatial_score,
    total_objective,
)
from .optimizer import OptimizeResult, OptimizerConfig, optimize, reoptimize_centers
from .ranges import (
    ChildRanges,
    FeasibleRange,
    RangeSet,
    calibration_sphere,
    default_range,
    determine_radii,
    make_child_ranges,
)
from .sampling import SamplerConfig, capacity, dart_throw, fit_radius_law
from .session import Session

__version__ = "0.1.0"

__all__ = [
    "RgbColor",
    "LabColor",
    "LchColor",
    "HsvColor",
    "convert",
    "ciede2000",
    "in_gamut",
    "to_hex",
    "ConfigurationError",
    "HierarchyError",
    "ExpansionError",
    "NotFoundError",
    "RangeEmptyError",
    "RangeCapacityWarning",
    "HierarchyNode",
    "SpatialLayout",
    "load_hierarchy",
    "load_layout",
    "build_neighbor_graph",
    "NameModel",
    "load_name_model",
    "default_name_model",
    "Palette",
    "HueTemplate",
    "ObjectiveContext",
    "perceptual_difference_score",
    "discriminability",
    "hue_difference",
    "hue_harmony",
    "cl_harmony",
    "pair_harmony",
    "spatial_score",
    "total_objective",
    "OptimizerConfig",
    "OptimizeResult",
    "optimize",
    "reoptimize_centers",
    "FeasibleRange",
    "RangeSet",
    "ChildRanges",
    "default_range",
    "determine_radii",
    "make_child_ranges",
    "calibration_sphere",
    "SamplerConfig",
    "dart_throw",
    "capacity",
    "fit_radius_law",
    "EvaluationReport",
    "bhdi",
    "evaluate",
    "silhouette",
    "distance_ratio",
    "Session",
    "__version__",
]
