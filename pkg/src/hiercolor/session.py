"""Stateful exploration sessions over a class hierarchy.

A session assigns the top level on creation and then expands nodes one at
a time: expanding a node sizes perceptual spheres for every sibling at
that level (so later sibling expansions are already accounted for) and
optimizes the node's children inside its own sphere.  Colors already on
screen are never touched by an expansion; the sphere anchors produced by
center adjustment are recorded separately, with their deltas, for display
and for the hierarchy-alignment metrics.

Everything is event-sourced: a session serializes to its inputs plus the
ordered expansion list, and replaying that log reproduces every color
bit for bit.  Per-node seeds are derived from the session seed and the
node id, so the palette of an expansion does not depend on how many
unrelated expansions happened before it.
"""

from __future__ import annotations

import zlib
from dataclasses import asdict, replace
from typing import Optional
from uuid import uuid4

import numpy as np

from .errors import ConfigurationError, ExpansionError, NotFoundError
from .hierarchy import HierarchyNode, load_hierarchy, load_layout
from .metrics import evaluate
from .naming import default_name_model
from .objectives import ObjectiveContext, Palette
from .optimizer import OptimizerConfig, optimize
from .ranges import default_range, make_child_ranges
from .sampling import SamplerConfig, capacity

RNG_ALGORITHM = "pcg64"

# sessions with at most this many top-level classes skip the capacity
# probe: the default box comfortably holds them at the 10-unit floor
_CAPACITY_PROBE_THRESHOLD = 20


def _derived_seed(base_seed: int, tag: str) -> int:
    ss = np.random.SeedSequence([base_seed & 0x7FFFFFFF, zlib.crc32(tag.encode())])
    return int(ss.generate_state(1)[0] % (2**31))


def config_to_json(cfg: OptimizerConfig) -> dict:
    return asdict(cfg)


def config_from_json(obj) -> OptimizerConfig:
    return OptimizerConfig(**obj) if obj else OptimizerConfig()


class Session:
    """One exploration run: hierarchy, optional layout, colors, event log."""

    def __init__(
        self,
        hierarchy,
        layout=None,
        mode: str = "difference",
        config: Optional[OptimizerConfig] = None,
        name_model=None,
        session_id: Optional[str] = None,
    ):
        self.id = session_id if session_id is not None else uuid4().hex
        self._hierarchy_raw = (
            hierarchy.to_json() if isinstance(hierarchy, HierarchyNode) else hierarchy
        )
        self.root = (
            hierarchy
            if isinstance(hierarchy, HierarchyNode)
            else load_hierarchy(hierarchy)
        )
        self._layout_raw = layout if not hasattr(layout, "labels") else None
        self.layout = (
            layout
            if layout is None or hasattr(layout, "labels")
            else load_layout(layout)
        )
        if mode not in ("difference", "similarity"):
            raise ConfigurationError(f"unknown spatial mode {mode!r}")
        if mode == "similarity" and self.layout is None:
            raise ConfigurationError("similarity mode needs a layout")
        self.mode = mode
        self.config = config if config is not None else OptimizerConfig()
        self.name_model = name_model if name_model is not None else default_name_model()

        self._parent = self.root.parent_map()
        self.colors: dict[str, tuple] = {}
        self.expanded: set[str] = set()
        self.contexts: dict[str, object] = {}  # container id -> ChildRanges
        self.reports: dict[str, object] = {}  # context id -> OptimizeResult
        self.warnings: list[str] = []
        self.events: list[dict] = []
        self._assign_top()

    # -- structure helpers -------------------------------------------------

    def node(self, node_id: str) -> HierarchyNode:
        hit = self.root.find(node_id)
        if hit is None:
            raise NotFoundError(node_id)
        return hit

    @property
    def top_classes(self) -> tuple[str, ...]:
        if self.root.children:
            return tuple(c.id for c in self.root.children)
        return (self.root.id,)

    def visible_classes(self) -> tuple[str, ...]:
        """Every node currently carrying a color, in stable tree order."""
        out = []

        def walk(node):
            for c in node.children:
                out.append(c.id)
                if c.id in self.expanded:
                    walk(c)

        if self.root.children:
            walk(self.root)
        else:
            out.append(self.root.id)
        return tuple(out)

    def frontier_classes(self) -> tuple[str, ...]:
        """Deepest visible classes: visible nodes that are not expanded."""
        return tuple(c for c in self.visible_classes() if c not in self.expanded)

    def context_of(self, node_id: str) -> str:
        """Container whose sibling spheres constrain this node's children."""
        parent = self._parent[node_id]
        return self.root.id if parent is None else parent

    def _ctx_for(self, classes) -> ObjectiveContext:
        layout = self.layout
        if layout is not None and not set(layout.labels) <= set(classes):
            layout = None  # the layout labels a different level of the tree
        mode = self.mode if layout is not None else "difference"
        return ObjectiveContext(
            name_model=self.name_model, layout=layout, mode=mode
        )

    # -- assignment --------------------------------------------------------

    def _assign_top(self):
        classes = self.top_classes
        if len(classes) > _CAPACITY_PROBE_THRESHOLD:
            probe = SamplerConfig(
                min_distance=10.0,
                max_consecutive_rejections=self.config.capacity_probe_budget,
                seed=self.config.seed,
            )
            trials = max(self.config.capacity_probe_trials, 1)
            cap = capacity(default_range(), probe, trials=trials)
            if cap < len(classes):
                import warnings

                from .errors import RangeCapacityWarning

                msg = (
                    f"default range holds ~{cap:.0f} discernible colors but the "
                    f"top level has {len(classes)} classes"
                )
                self.warnings.append(msg)
                warnings.warn(msg, RangeCapacityWarning)
        ctx = self._ctx_for(classes)
        result = optimize(classes, ctx, self.config)
        for cid in classes:
            self.colors[cid] = tuple(result.palette.color_of(cid))
        self.reports[self.root.id] = result

    def expand(self, node_id: str):
        """Assign colors to a node's children; idempotent per node."""
        node = self.node(node_id)
        if node.is_leaf:
            raise ExpansionError(f"node {node_id!r} has no children")
        if node_id not in self.visible_classes():
            raise ExpansionError(f"node {node_id!r} is not currently visible")
        if node_id in self.expanded:
            return self.child_palette(node_id)

        context_id = self.context_of(node_id)
        if context_id not in self.contexts:
            container = (
                self.root if context_id == self.root.id else self.node(context_id)
            )
            siblings = tuple(c.id for c in container.children)
            anchors = Palette(
                siblings, tuple(self.colors[s] for s in siblings)
            )
            counts = {
                c.id: max(len(c.children), 1) for c in container.children
            }
            cfg = replace(
                self.config, seed=_derived_seed(self.config.seed, f"ranges:{context_id}")
            )
            ctx = ObjectiveContext(name_model=self.name_model)
            self.contexts[context_id] = make_child_ranges(anchors, counts, ctx, cfg)
            self.warnings.extend(self.contexts[context_id].warnings)

        ranges = self.contexts[context_id]
        sphere = ranges.spheres.for_class(node_id)
        child_classes = tuple(c.id for c in node.children)
        mapping = {c: sphere for c in child_classes}
        cfg = replace(self.config, seed=_derived_seed(self.config.seed, f"expand:{node_id}"))
        ctx = self._ctx_for(child_classes)
        result = optimize(child_classes, ctx, cfg, ranges=mapping)
        for cid in child_classes:
            self.colors[cid] = tuple(result.palette.color_of(cid))
        self.expanded.add(node_id)
        self.reports[node_id] = result
        self.events.append({"type": "expand", "node_id": node_id})
        return self.child_palette(node_id)

    def child_palette(self, node_id: str) -> Palette:
        node = self.node(node_id)
        classes = tuple(c.id for c in node.children)
        return Palette(classes, tuple(self.colors[c] for c in classes))

    # -- views ---------------------------------------------------------------

    def node_rows(self) -> list[dict]:
        """One row per visible node, tree order, with color and structure."""
        rows = []

        def walk(node, depth):
            for c in node.children:
                p = Palette((c.id,), (self.colors[c.id],))
                entry = p.to_json()[0]
                rows.append(
                    {
                        "id": c.id,
                        "label": c.label,
                        "parent": node.id,
                        "depth": depth,
                        "color": entry["color"],
                        "hex": entry["hex"],
                        "expanded": c.id in self.expanded,
                        "has_children": not c.is_leaf,
                    }
                )
                if c.id in self.expanded:
                    walk(c, depth + 1)

        if self.root.children:
            walk(self.root, 0)
        else:
            c = self.root
            p = Palette((c.id,), (self.colors[c.id],))
            entry = p.to_json()[0]
            rows.append(
                {
                    "id": c.id,
                    "label": c.label,
                    "parent": None,
                    "depth": 0,
                    "color": entry["color"],
                    "hex": entry["hex"],
                    "expanded": False,
                    "has_children": False,
                }
            )
        return rows

    def palette_payload(self) -> dict:
        return {
            "session_id": self.id,
            "mode": self.mode,
            "seed": self.config.seed,
            "rng": RNG_ALGORITHM,
            "nodes": self.node_rows(),
        }

    def ranges_payload(self, context_id: str) -> list[dict]:
        ranges = self.contexts[context_id]
        out = ranges.spheres.to_json()
        deltas = ranges.deltas
        anchors = ranges.adjusted
        for row in out:
            cid = row["class"]
            row["anchor_delta"] = deltas[cid]
            p = Palette((cid,), (tuple(anchors.color_of(cid)),))
            row["anchor"] = p.to_json()[0]["color"]
        return out

    def evaluation_payload(self) -> dict:
        """Frontier report plus one hierarchical report per expansion level."""
        frontier = self.frontier_classes()
        out = {"session_id": self.id, "rng": RNG_ALGORITHM, "levels": []}
        if len(frontier) >= 2:
            p = Palette(frontier, tuple(self.colors[c] for c in frontier))
            out["frontier"] = evaluate(p, self._ctx_for(frontier)).to_json()
        contexts = sorted(
            {self.context_of(n) for n in self.expanded}
        )
        for context_id in contexts:
            expanded_here = [
                n
                for n in (
                    c.id
                    for c in (
                        self.root
                        if context_id == self.root.id
                        else self.node(context_id)
                    ).children
                )
                if n in self.expanded
            ]
            children = []
            parent_of = {}
            for nid in expanded_here:
                for c in self.node(nid).children:
                    children.append(c.id)
                    parent_of[c.id] = nid
            if len(children) < 2:
                continue
            child_palette = Palette(
                tuple(children), tuple(self.colors[c] for c in children)
            )
            anchors = self.contexts[context_id].adjusted
            ctx = self._ctx_for(children)
            if len(set(parent_of.values())) >= 2:
                report = evaluate(child_palette, ctx, anchors, parent_of)
            else:
                report = evaluate(child_palette, ctx)
                from .metrics import distance_ratio

                dr = distance_ratio(child_palette, anchors, parent_of)
                report = replace(report, dr=dr)
            out["levels"].append(
                {
                    "context": context_id,
                    "classes": children,
                    "report": report.to_json(),
                }
            )
        return out

    # -- persistence ---------------------------------------------------------

    def to_event_log(self) -> dict:
        if self._layout_raw is None and self.layout is not None:
            raise ConfigurationError(
                "cannot serialize a session built from an in-memory layout"
            )
        return {
            "session_id": self.id,
            "hierarchy": self._hierarchy_raw,
            "layout": self._layout_raw,
            "mode": self.mode,
            "rng": RNG_ALGORITHM,
            "config": config_to_json(self.config),
            "events": list(self.events),
        }

    @classmethod
    def replay(cls, log: dict) -> "Session":
        session = cls(
            log["hierarchy"],
            layout=log.get("layout"),
            mode=log.get("mode", "difference"),
            config=config_from_json(log.get("config")),
            session_id=log.get("session_id"),
        )
        for event in log.get("events", ()):
            if event.get("type") == "expand":
                session.expand(event["node_id"])
            else:
                raise ConfigurationError(f"unknown event type {event.get('type')!r}")
        return session
