"""Staged simulated annealing over palettes.

Goals are added one at a time: discriminability first, then harmony, then
the spatial term when a layout is present.  Each later stage anneals the
full weighted objective but only keeps states that do not regress the
newly added goal below its value at stage entry, and every move must keep
the normalized priority chain E_D >= E_H >= E_SD intact.

The normalization ceiling for E_D is calibrated to the stage-1 converged
value: with the analytic ceiling the chain could never be satisfied, so
the first stage's result defines what "fully discriminable" means for the
rest of the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _engine
from .colorspace import _XYZ_TO_RGB, cross_ciede2000, lch_to_lab
from .errors import ConfigurationError, RangeEmptyError
from .naming import NameModel
from .objectives import (
    NullPairHarmony,
    ObjectiveBreakdown,
    ObjectiveContext,
    Palette,
    TanhPairHarmony,
    cl_harmony,
    hue_harmony,
    spatial_score,
    total_objective,
)
from .ranges import FeasibleRange, RangeSet, default_range, narrowed_range

_STAGE_NAMES = {1: "D", 2: "D+H", 3: "D+H+SD"}


@dataclass(frozen=True)
class OptimizerConfig:
    cooling_rate: float = 0.93
    iterations_per_temperature: int = 150
    min_temperature: float = 1e-3
    initial_temperature: Optional[float] = None
    move_scale: float = 8.0
    swap_probability: float = 0.2
    convergence_window: int = 25
    convergence_epsilon: float = 1e-6
    chain_margin: float = 0.006
    seed: int = 0
    min_distance: float = 10.0
    rejection_budget: int = 5000
    capacity_probe_trials: int = 3
    capacity_probe_budget: int = 400
    max_blocks: int = 2048

    def __post_init__(self):
        if not 0.0 < self.cooling_rate < 1.0:
            raise ConfigurationError("cooling_rate must be in (0, 1)")
        if self.iterations_per_temperature < 1:
            raise ConfigurationError("iterations_per_temperature must be >= 1")
        if self.min_temperature <= 0.0:
            raise ConfigurationError("min_temperature must be positive")
        if self.move_scale <= 0.0:
            raise ConfigurationError("move_scale must be positive")
        if not 0.0 <= self.swap_probability < 1.0:
            raise ConfigurationError("swap_probability must be in [0, 1)")
        if self.convergence_window < 1:
            raise ConfigurationError("convergence_window must be >= 1")
        if self.chain_margin < 0.0:
            raise ConfigurationError("chain_margin must be >= 0")


@dataclass(frozen=True, eq=False)
class StageReport:
    stage: str
    weight: float
    value: float
    breakdown: ObjectiveBreakdown
    temperatures: int
    proposals: int
    accepted: int
    trace: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class OptimizeResult:
    palette: Palette
    value: float
    breakdown: ObjectiveBreakdown
    alpha: float
    beta: float
    d_max: float
    priority_ok: bool
    stages: tuple[StageReport, ...]
    seed: int


def weight_for_new_goal(current: float, maximum: float) -> float:
    """Weight of a newly added goal: its entry value over its ceiling."""
    if maximum <= 0.0:
        raise ConfigurationError("goal ceiling must be positive")
    return float(np.clip(current / maximum, 0.0, 1.0))


# ---------------------------------------------------------------------------
# packing helpers


def _pack_templates(templates):
    chromatic = [t for t in templates if not t.achromatic]
    n = len(chromatic)
    width = max((len(t.sectors) for t in chromatic), default=1)
    centers = np.zeros((n, width))
    halves = np.zeros((n, width))
    nsec = np.zeros(n, dtype=np.int64)
    for ti, t in enumerate(chromatic):
        nsec[ti] = len(t.sectors)
        for si, (c, w) in enumerate(t.sectors):
            centers[ti, si] = float(c)
            halves[ti, si] = float(w) / 2.0
    return centers, halves, nsec


def _pair_config(scorer):
    if isinstance(scorer, TanhPairHarmony):
        return 1, np.asarray(scorer.coefficients, dtype=float)
    if isinstance(scorer, NullPairHarmony):
        return 0, np.zeros(27)
    raise ConfigurationError(
        "the annealing engine supports only the bundled pair-harmony scorers "
        f"(got {type(scorer).__name__}); custom scorers can still be used "
        "with the objective functions directly"
    )


def _resolve_ranges(classes, ranges):
    if ranges is None:
        r = default_range()
        return {c: r for c in classes}
    if isinstance(ranges, FeasibleRange):
        return {c: ranges for c in classes}
    if isinstance(ranges, RangeSet):
        return {c: ranges.for_class(c) for c in classes}
    if isinstance(ranges, dict):
        return {c: ranges[c] for c in classes}
    raise ConfigurationError("ranges must be a FeasibleRange, RangeSet or dict")


def _pack_ranges(classes, per_class):
    m = len(classes)
    first = per_class[classes[0]]
    box = np.array(
        [first.l_bounds[0], first.l_bounds[1], first.c_bounds[0], first.c_bounds[1]]
    )
    excl_on = 1 if first.exclusion_l is not None else 0
    if excl_on:
        excl = np.array([*first.exclusion_l, *first.exclusion_h])
    else:
        excl = np.zeros(4)
    variant = np.zeros(m, dtype=np.int64)
    center = np.zeros((m, 3))
    radius = np.zeros(m)
    hlo = np.zeros(m)
    hhi = np.full(m, 360.0)
    for i, cid in enumerate(classes):
        r = per_class[cid]
        if (r.l_bounds, r.c_bounds, r.exclusion_l, r.exclusion_h) != (
            first.l_bounds,
            first.c_bounds,
            first.exclusion_l,
            first.exclusion_h,
        ):
            raise ConfigurationError(
                "all class ranges in one optimization must share the same "
                "bounding box and exclusion zone"
            )
        if r.variant == "sphere":
            variant[i] = 1
            center[i] = np.asarray(r.center, dtype=float)
            radius[i] = float(r.radius)
            hlo[i] = float(r.hue_interval[0])
            hhi[i] = float(r.hue_interval[1])
    return box, excl_on, excl, variant, center, radius, hlo, hhi


def _similarity_for(ctx, palette):
    if ctx.mode != "similarity" or ctx.layout is None:
        return np.zeros((len(palette), len(palette)))
    from .objectives import _similarity_matrix

    return np.asarray(_similarity_matrix(palette, ctx.layout, ctx.similarity))


# ---------------------------------------------------------------------------
# initialization


def _propose_in(rng, range_, n):
    (l_lo, l_hi), (c_lo, c_hi), (h_lo, h_hi) = range_.sample_bounds()
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


def _initial_colors(classes, per_class, cfg, seed):
    """Sequential rejection sampling, one range per class.

    The minimum mutual distance is halved (down to 0.5) whenever the
    rejection budget runs out, so tight child spheres still get seeded.
    """
    m = len(classes)
    min_d = cfg.min_distance
    while True:
        rng = np.random.Generator(np.random.PCG64(seed))
        out = np.zeros((m, 3))
        out_lab = np.zeros((m, 3))
        ok = True
        for i, cid in enumerate(classes):
            range_ = per_class[cid]
            rejections = 0
            barren = 0
            placed = False
            while rejections < cfg.rejection_budget:
                batch = _propose_in(rng, range_, 64)
                members = batch[range_.contains_many(batch)]
                if members.shape[0] == 0:
                    barren += 64
                    if barren >= 200_000:
                        raise RangeEmptyError(
                            f"feasible range for class {cid!r} contains no colors"
                        )
                    continue
                barren = 0
                lab = lch_to_lab(members)
                if i > 0:
                    dmin = cross_ciede2000(lab, out_lab[:i]).min(axis=1)
                else:
                    dmin = np.full(members.shape[0], np.inf)
                for j in range(members.shape[0]):
                    if dmin[j] >= min_d:
                        out[i] = members[j]
                        out_lab[i] = lab[j]
                        placed = True
                        break
                    rejections += 1
                    if rejections >= cfg.rejection_budget:
                        break
                if placed:
                    break
            if not placed:
                ok = False
                break
        if ok:
            return out
        if min_d <= 0.5:
            raise RangeEmptyError(
                "could not seed all classes even at the minimum mutual distance"
            )
        min_d = max(min_d / 2.0, 0.5)


def _project_into(range_, lch, init_lab, idx, all_init_lab):
    """Nearest feasible lattice point that keeps the nearest-initial rule."""
    (l_lo, l_hi), (c_lo, c_hi), _ = range_.sample_bounds()
    L = np.linspace(l_lo, l_hi, 15)
    C = np.linspace(c_lo, c_hi, 15)
    h = np.arange(0.0, 360.0, 5.0)
    pts = np.stack(np.meshgrid(L, C, h, indexing="ij"), axis=-1).reshape(-1, 3)
    pts = pts[range_.contains_many(pts)]
    if pts.shape[0] == 0:
        raise RangeEmptyError("projection target range contains no colors")
    lab = lch_to_lab(pts)
    own = cross_ciede2000(lab, all_init_lab[idx][None, :]).ravel()
    others = np.delete(all_init_lab, idx, axis=0)
    if others.shape[0]:
        nearest_other = cross_ciede2000(lab, others).min(axis=1)
        mask = own < nearest_other
        if not mask.any():
            raise ConfigurationError(
                "cannot project a parent color into the narrowed box without "
                "losing its nearest-initial assignment"
            )
        pts, own = pts[mask], own[mask]
    return pts[int(np.argmin(own))]


# ---------------------------------------------------------------------------
# stage driver


class _Packed:
    """Engine-ready arrays shared by every stage of one run."""

    def __init__(self, classes, ctx, cfg, per_class, init_lab, nearest_on, palette0):
        self.classes = classes
        (
            self.box,
            self.excl_on,
            self.excl,
            self.variant,
            self.center,
            self.radius,
            self.hlo,
            self.hhi,
        ) = _pack_ranges(classes, per_class)
        self.pair_on, self.pair_k = _pair_config(ctx.pair_scorer)
        self.t_centers, self.t_halves, self.t_nsec = _pack_templates(ctx.templates)
        self.bins_lab = np.ascontiguousarray(ctx.name_model.bins_lab, dtype=float)
        self.bin_cos = np.ascontiguousarray(ctx.name_model.bin_cosine, dtype=float)
        m = len(classes)
        if ctx.layout is not None:
            self.W = np.ascontiguousarray(ctx.layout.pair_weights(classes))
        else:
            self.W = np.zeros((m, m))
        self.S = np.ascontiguousarray(_similarity_for(ctx, palette0))
        self.sim_mode = 1 if ctx.mode == "similarity" else 0
        self.M = np.ascontiguousarray(_XYZ_TO_RGB)
        self.init_lab = np.ascontiguousarray(init_lab)
        self.nearest_on = nearest_on
        self.cfg = cfg


def _run_stage(stage, lch, packed, ctx, cfg, alpha, beta, d_max, floor_value, seed):
    m = lch.shape[0]
    trace = np.zeros((cfg.max_blocks, 3))
    best = np.zeros((m, 3))
    floor_best = np.zeros((m, 3))
    sd_on = 1 if (stage == 3 and ctx.layout is not None) else 0
    t0 = -1.0 if cfg.initial_temperature is None else float(cfg.initial_temperature)
    blocks, proposals, accepted, best_value, floor_found, _ = _engine.anneal_stage(
        stage,
        lch,
        packed.W,
        packed.S,
        packed.sim_mode,
        sd_on,
        packed.pair_on,
        packed.bins_lab,
        packed.bin_cos,
        packed.pair_k,
        packed.t_centers,
        packed.t_halves,
        packed.t_nsec,
        packed.variant,
        packed.center,
        packed.radius,
        packed.hlo,
        packed.hhi,
        packed.box,
        packed.excl_on,
        packed.excl,
        packed.nearest_on,
        packed.init_lab,
        packed.M,
        float(ctx.gamma1),
        float(ctx.gamma2),
        float(alpha),
        float(beta),
        float(d_max),
        float(ctx.sd_max),
        float(cfg.chain_margin),
        float(floor_value),
        t0,
        float(cfg.cooling_rate),
        int(cfg.iterations_per_temperature),
        float(cfg.min_temperature),
        float(cfg.move_scale),
        float(cfg.swap_probability),
        int(cfg.convergence_window),
        float(cfg.convergence_epsilon),
        int(seed),
        trace,
        best,
        floor_best,
    )
    chosen = best if stage == 1 else floor_best
    return chosen.copy(), trace[:blocks].copy(), int(proposals), int(accepted)


def _stage_seeds(seed, n=4):
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1)[0] % (2**31)) for s in ss.spawn(n)]


def _single_color_result(palette, ctx, cfg):
    e_hue = hue_harmony(palette, ctx.templates)
    e_lc, _ = cl_harmony(palette)
    if ctx.layout is not None:
        e_sd = spatial_score(palette, ctx.layout, ctx.mode, ctx.pair_scorer, ctx.similarity)
        norm_sd = float(np.clip(e_sd / ctx.sd_max, 0.0, 1.0))
    else:
        e_sd, norm_sd = 0.0, 0.0
    breakdown = ObjectiveBreakdown(
        e_pd=0.0,
        e_nd=0.0,
        e_d=0.0,
        e_hue=e_hue,
        e_lc=e_lc,
        e_h=e_hue + e_lc,
        e_sd=e_sd,
        normalized_d=0.0,
        normalized_h=float(np.clip((e_hue + e_lc) / 2.0, 0.0, 1.0)),
        normalized_sd=norm_sd,
    )
    return OptimizeResult(
        palette=palette,
        value=0.0,
        breakdown=breakdown,
        alpha=0.0,
        beta=0.0,
        d_max=ctx.effective_d_max,
        priority_ok=True,
        stages=(),
        seed=cfg.seed,
    )


def optimize(
    classes,
    ctx: ObjectiveContext,
    cfg: Optional[OptimizerConfig] = None,
    ranges=None,
    initial: Optional[Palette] = None,
) -> OptimizeResult:
    """Assign colors to classes by staged annealing inside feasible ranges."""
    cfg = cfg if cfg is not None else OptimizerConfig()
    classes = tuple(str(c) for c in classes)
    if not classes:
        raise ConfigurationError("optimize needs at least one class")
    if len(set(classes)) != len(classes):
        raise ConfigurationError("class ids must be unique")
    per_class = _resolve_ranges(classes, ranges)
    _pair_config(ctx.pair_scorer)  # reject scorers the engine cannot run

    seeds = _stage_seeds(cfg.seed)
    if initial is not None:
        if tuple(initial.classes) != classes:
            raise ConfigurationError("initial palette classes do not match")
        lch0 = initial.lch_array()
        for i, cid in enumerate(classes):
            if not per_class[cid].contains_many(lch0[i][None, :])[0]:
                raise ConfigurationError(
                    f"initial color for class {cid!r} is outside its range"
                )
    else:
        lch0 = _initial_colors(classes, per_class, cfg, seeds[0])

    palette0 = Palette(classes, tuple(map(tuple, lch0)))
    if len(classes) == 1:
        return _single_color_result(palette0, ctx, cfg)

    packed = _Packed(
        classes, ctx, cfg, per_class, lch_to_lab(lch0), 0, palette0
    )
    return _staged_run(palette0, packed, ctx, cfg, seeds)


def _staged_run(palette0, packed, ctx, cfg, seeds, n_stages=None):
    classes = palette0.classes
    if n_stages is None:
        n_stages = 3 if ctx.layout is not None else 2

    # stage 1: discriminability only
    lch = palette0.lch_array().copy()
    lch1, trace1, prop1, acc1 = _run_stage(
        1, lch, packed, ctx, cfg, 0.0, 0.0, 1.0, -1.0e300, seeds[1]
    )
    p1 = palette0.with_colors(lch1)
    _, b1_raw, _ = total_objective(p1, ctx, 0.0, 0.0)
    d_max = max(b1_raw.e_d, 1e-9)
    ctx_cal = ctx.calibrated(d_max)
    v1, b1, _ = total_objective(p1, ctx_cal, 0.0, 0.0)
    stages = [
        StageReport(
            stage=_STAGE_NAMES[1],
            weight=1.0,
            value=b1.e_d,
            breakdown=b1,
            temperatures=trace1.shape[0],
            proposals=prop1,
            accepted=acc1,
            trace=trace1,
        )
    ]
    final, b_final = p1, b1
    alpha = 0.0
    beta = 0.0

    if n_stages >= 2:
        alpha = weight_for_new_goal(b1.e_h, 2.0)
        floor_h = b1.e_h
        lch2, trace2, prop2, acc2 = _run_stage(
            2, p1.lch_array().copy(), packed, ctx, cfg, alpha, 0.0, d_max,
            floor_h - 1e-9, seeds[2],
        )
        p2 = palette0.with_colors(lch2)
        _, b2, _ = total_objective(p2, ctx_cal, alpha, 0.0)
        if b2.e_h < floor_h:  # exact re-check; keep the entry state instead
            p2, b2 = p1, b1
        stages.append(
            StageReport(
                stage=_STAGE_NAMES[2],
                weight=alpha,
                value=b2.e_d + alpha * b2.e_h,
                breakdown=b2,
                temperatures=trace2.shape[0],
                proposals=prop2,
                accepted=acc2,
                trace=trace2,
            )
        )
        final, b_final = p2, b2

    if n_stages >= 3 and ctx.layout is not None:
        beta = weight_for_new_goal(max(b_final.e_sd, 0.0), ctx_cal.sd_max)
        floor_sd = b_final.e_sd
        lch3, trace3, prop3, acc3 = _run_stage(
            3, final.lch_array().copy(), packed, ctx, cfg, alpha, beta, d_max,
            floor_sd - 1e-9, seeds[3],
        )
        p3 = palette0.with_colors(lch3)
        _, b3, _ = total_objective(p3, ctx_cal, alpha, beta)
        if b3.e_sd < floor_sd:
            p3, b3 = final, b_final
        stages.append(
            StageReport(
                stage=_STAGE_NAMES[3],
                weight=beta,
                value=b3.e_d + alpha * b3.e_h + beta * b3.e_sd,
                breakdown=b3,
                temperatures=trace3.shape[0],
                proposals=prop3,
                accepted=acc3,
                trace=trace3,
            )
        )
        final, b_final = p3, b3

    value, breakdown, priority_ok = total_objective(final, ctx_cal, alpha, beta)
    return OptimizeResult(
        palette=final,
        value=value,
        breakdown=breakdown,
        alpha=alpha,
        beta=beta,
        d_max=d_max,
        priority_ok=priority_ok,
        stages=tuple(stages),
        seed=cfg.seed,
    )


def reoptimize_centers(
    palette: Palette, ctx: ObjectiveContext, cfg: Optional[OptimizerConfig] = None
) -> Palette:
    """Re-anneal colors inside the narrowed box, keeping each color strictly
    nearest to its own starting point; used before sizing child spheres."""
    cfg = cfg if cfg is not None else OptimizerConfig()
    classes = tuple(palette.classes)
    narrow = narrowed_range()
    per_class = {c: narrow for c in classes}
    init_lab = palette.lab_array()

    lch0 = palette.lch_array().copy()
    member = narrow.contains_many(lch0)
    for i in range(len(classes)):
        if not member[i]:
            lch0[i] = _project_into(narrow, lch0[i], init_lab, i, init_lab)

    projected = palette.with_colors(lch0)
    if len(classes) == 1:
        return projected

    seeds = _stage_seeds(cfg.seed)
    packed = _Packed(classes, ctx, cfg, per_class, init_lab, 1, projected)
    result = _staged_run(projected, packed, ctx, cfg, seeds, n_stages=2)
    return result.palette
