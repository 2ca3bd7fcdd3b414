"""Command-line interface.

Subcommands mirror the exploration loop: ``assign`` colors a hierarchy's
top level (optionally writing a replayable session log), ``expand`` grows
one node of a saved session, ``evaluate`` prints palette meters, and the
two calibration commands — ``calibrate-radius`` and ``trace`` — expose the
measurements behind the sphere-sizing law and the annealing schedule.

Machine-readable results go to stdout (JSON or CSV, stable key order);
human-oriented summaries and tables go to stderr so pipelines stay clean.
"""

from __future__ import annotations

import csv
import io
import json
import sys

import click
import numpy as np

from .errors import (
    ConfigurationError,
    ExpansionError,
    HierarchyError,
    NotFoundError,
    RangeEmptyError,
)
from .metrics import EvaluationReport
from .optimizer import OptimizerConfig
from .ranges import calibration_sphere
from .sampling import SamplerConfig, dart_throw, fit_radius_law
from .session import Session, config_from_json

_USER_ERRORS = (
    HierarchyError,
    ConfigurationError,
    ExpansionError,
    NotFoundError,
    ValueError,
)


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise click.ClickException(f"cannot read {what} file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{what} file {path} is not valid JSON: {exc}") from exc


def _build_config(config_path, seed) -> OptimizerConfig:
    cfg = (
        config_from_json(_load_json(config_path, "config"))
        if config_path
        else OptimizerConfig()
    )
    if seed is not None:
        from dataclasses import replace

        cfg = replace(cfg, seed=seed)
    return cfg


def _emit_json(doc: dict, output) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _emit_csv(header, rows, output) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        click.echo(buf.getvalue(), nl=False)


def _write_session_log(session: Session, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(session.to_event_log(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _make_session(hierarchy, layout, mode, seed, config_path) -> Session:
    hier_doc = _load_json(hierarchy, "hierarchy")
    layout_doc = _load_json(layout, "layout") if layout else None
    cfg = _build_config(config_path, seed)
    try:
        return Session(
            hier_doc,
            layout=layout_doc,
            mode=mode,
            config=cfg,
            session_id=f"cli-{cfg.seed}",
        )
    except _USER_ERRORS as exc:
        raise click.ClickException(str(exc)) from exc


mode_option = click.option(
    "--mode",
    type=click.Choice(["difference", "similarity"]),
    default="difference",
    show_default=True,
    help="spatial objective: keep neighbors apart, or tie color to feature similarity",
)
seed_option = click.option("--seed", type=int, default=None, help="override the RNG seed")
config_option = click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="optimizer config JSON file",
)
layout_option = click.option(
    "--layout",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="spatial layout JSON file",
)
output_option = click.option(
    "--output", type=click.Path(dir_okay=False), default=None, help="write to file instead of stdout"
)


@click.group()
@click.version_option(package_name="hiercolor")
def main():
    """Hierarchical color assignment: optimize, expand, evaluate, calibrate."""


@main.command()
@click.argument("hierarchy", type=click.Path(exists=True, dir_okay=False))
@layout_option
@mode_option
@seed_option
@config_option
@click.option(
    "--session",
    "session_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="write a replayable session log here for later `expand`/`evaluate`",
)
@output_option
def assign(hierarchy, layout, mode, seed, config_path, session_path, output):
    """Color the top level of HIERARCHY and print the palette as JSON."""
    session = _make_session(hierarchy, layout, mode, seed, config_path)
    for note in session.warnings:
        click.echo(f"warning: {note}", err=True)
    if session_path:
        _write_session_log(session, session_path)
    _emit_json(session.palette_payload(), output)


@main.command()
@click.argument("session_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("node_id")
@output_option
def expand(session_file, node_id, output):
    """Expand NODE_ID in a saved session, updating SESSION_FILE in place."""
    log = _load_json(session_file, "session")
    try:
        session = Session.replay(log)
        known = len(session.warnings)
        palette = session.expand(node_id)
    except _USER_ERRORS as exc:
        raise click.ClickException(str(exc)) from exc
    for note in session.warnings[known:]:
        click.echo(f"warning: {note}", err=True)
    _write_session_log(session, session_file)
    _emit_json(
        {
            "session_id": session.id,
            "node_id": node_id,
            "children": palette.to_json(),
            "ranges": session.ranges_payload(session.context_of(node_id)),
        },
        output,
    )


@main.command()
@click.argument("session_file", type=click.Path(exists=True, dir_okay=False))
@output_option
def evaluate(session_file, output):
    """Print palette meters for a saved session: JSON, plus a table on stderr."""
    log = _load_json(session_file, "session")
    try:
        session = Session.replay(log)
        payload = session.evaluation_payload()
    except _USER_ERRORS as exc:
        raise click.ClickException(str(exc)) from exc
    _emit_json(payload, output)
    scopes = []
    if "frontier" in payload:
        scopes.append(("frontier", payload["frontier"]))
    scopes.extend(
        (f"children of {level['context']}", level["report"])
        for level in payload["levels"]
    )
    for name, report in scopes:
        click.echo(f"[{name}]", err=True)
        click.echo(EvaluationReport.from_json(report).table(), err=True)


@main.command("calibrate-radius")
@click.option(
    "--radii",
    default="5,10,15,20,25",
    show_default=True,
    help="comma-separated sphere radii (CIEDE2000 units)",
)
@click.option("--trials", type=click.IntRange(min=1), default=20, show_default=True)
@click.option(
    "--min-distance",
    type=float,
    default=10.0,
    show_default=True,
    help="discernibility threshold between sampled colors",
)
@click.option("--seed", type=int, default=0, show_default=True)
@output_option
def calibrate_radius(radii, trials, min_distance, seed, output):
    """Measure how many discernible colors fit per sphere radius.

    Emits one dart-throwing saturation count per (radius, trial) as CSV
    and fits capacity = scale * radius^exponent, printing the fitted law
    on stderr.  The square law motivates sizing sibling spheres by the
    square root of their child counts.
    """
    try:
        values = sorted({float(tok) for tok in radii.split(",") if tok.strip()})
    except ValueError as exc:
        raise click.ClickException(f"bad --radii list: {exc}") from exc
    if not values or any(r <= 0 for r in values):
        raise click.ClickException("--radii needs positive numbers")

    trial_seeds = [
        int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(trials)
    ]
    rows = []
    samples = []
    for r in values:
        sphere = calibration_sphere(r)
        for trial, trial_seed in enumerate(trial_seeds):
            cfg = SamplerConfig(
                min_distance=min_distance,
                max_consecutive_rejections=400,
                seed=trial_seed,
            )
            try:
                count = len(dart_throw(sphere, None, cfg))
            except RangeEmptyError:
                count = 0
            rows.append((f"{r:g}", trial, count))
            samples.append((r, count))
    _emit_csv(("radius", "trial", "capacity"), rows, output)

    positive = [(r, c) for r, c in samples if c > 0]
    try:
        fit = fit_radius_law(positive)
    except ConfigurationError as exc:
        click.echo(f"no law fitted: {exc}", err=True)
        return
    click.echo(
        f"capacity ~= {fit.scale:.4f} * radius^{fit.exponent:.3f} "
        f"(R^2 = {fit.r_squared:.3f}, n = {len(positive)})",
        err=True,
    )


@main.command()
@click.argument("hierarchy", type=click.Path(exists=True, dir_okay=False))
@layout_option
@mode_option
@seed_option
@config_option
@output_option
def trace(hierarchy, layout, mode, seed, config_path, output):
    """Emit the annealing schedule of a top-level assignment as CSV.

    One row per temperature block: the stage name, the temperature, the
    best objective value reached so far, and the block acceptance rate.
    """
    session = _make_session(hierarchy, layout, mode, seed, config_path)
    result = session.reports[session.root.id]
    rows = []
    for stage in result.stages:
        for temperature, best_value, acceptance in stage.trace:
            rows.append(
                (stage.stage, f"{temperature:.9g}", f"{best_value:.9g}", f"{acceptance:.6f}")
            )
    _emit_csv(("stage", "temperature", "best_value", "acceptance_rate"), rows, output)


if __name__ == "__main__":
    main(prog_name="hiercolor")
