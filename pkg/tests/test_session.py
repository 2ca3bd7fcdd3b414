"""Exploration session tests.

The invariants audited here are bit-level where the contract is bit-level:
expansion must leave every already-visible color unchanged (tuple equality,
not tolerance), replaying an event log must reproduce identical palette
JSON, and expanding nodes in a different order must still give each node
the same children colors because per-node seeds derive from the session
seed and the node id alone.
"""

import json

import numpy as np
import pytest

from hiercolor.colorspace import LchColor, pairwise_ciede2000, to_hex
from hiercolor.errors import (
    ConfigurationError,
    ExpansionError,
    NotFoundError,
    RangeCapacityWarning,
)
from hiercolor.hierarchy import SpatialLayout, build_neighbor_graph
from hiercolor.objectives import Palette
from hiercolor.optimizer import OptimizerConfig
from hiercolor.session import RNG_ALGORITHM, Session, config_from_json, config_to_json


def leaf(i):
    return {"id": f"leaf{i}", "label": f"Leaf {i}"}


def two_level():
    return {
        "id": "root",
        "label": "root",
        "children": [
            {
                "id": "animals",
                "label": "Animals",
                "children": [
                    {"id": "cat", "label": "Cat"},
                    {"id": "dog", "label": "Dog"},
                    {"id": "fox", "label": "Fox"},
                ],
            },
            {
                "id": "plants",
                "label": "Plants",
                "children": [
                    {"id": "oak", "label": "Oak"},
                    {"id": "fern", "label": "Fern"},
                ],
            },
            {
                "id": "rocks",
                "label": "Rocks",
                "children": [
                    {"id": "shale", "label": "Shale"},
                    {"id": "flint", "label": "Flint"},
                ],
            },
        ],
    }


def three_level():
    spec = two_level()
    cat = spec["children"][0]["children"][0]
    cat["children"] = [
        {"id": "kitten", "label": "Kitten"},
        {"id": "tomcat", "label": "Tomcat"},
    ]
    return spec


def quick_config(seed=7, **overrides):
    return OptimizerConfig(seed=seed, **overrides)


@pytest.fixture(scope="module")
def expanded_session():
    """One shared session with two parents expanded, for read-only checks."""
    s = Session(two_level(), config=quick_config(seed=5), session_id="shared")
    s.expand("animals")
    s.expand("plants")
    return s


class TestTopAssignment:
    def test_deterministic_and_discriminable(self):
        spec = {"id": "root", "label": "root", "children": [leaf(i) for i in range(10)]}
        a = Session(spec, config=quick_config(seed=3))
        b = Session(spec, config=quick_config(seed=3))
        assert a.colors == b.colors
        pal = Palette(a.top_classes, tuple(a.colors[c] for c in a.top_classes))
        d = pairwise_ciede2000(pal.lab_array())
        iu = np.triu_indices(len(pal), k=1)
        assert d[iu].min() >= 10.0

    def test_single_class_hierarchy(self):
        s = Session({"id": "only", "label": "Only"}, config=quick_config())
        assert s.visible_classes() == ("only",)
        assert set(s.colors) == {"only"}
        rows = s.node_rows()
        assert len(rows) == 1 and rows[0]["parent"] is None

    def test_capacity_warning_when_top_level_is_crowded(self):
        spec = {"id": "root", "label": "root", "children": [leaf(i) for i in range(24)]}
        # a tiny rejection budget makes the probe estimate ~14 colors,
        # well under the 24 requested, so the warning must fire
        cfg = quick_config(seed=2, capacity_probe_budget=5, capacity_probe_trials=2)
        with pytest.warns(RangeCapacityWarning):
            s = Session(spec, config=cfg)
        assert s.warnings
        assert len(s.colors) == 24  # assignment proceeds regardless

    def test_similarity_mode_requires_layout(self):
        with pytest.raises(ConfigurationError):
            Session(two_level(), mode="similarity", config=quick_config())

    def test_unknown_mode_rejected(self):
        with pytest.raises(ConfigurationError):
            Session(two_level(), mode="contrast", config=quick_config())

    def test_layout_applies_only_to_matching_level(self):
        # Layout labels name the top-level classes, so the top assignment
        # uses it while child expansions (different class ids) must not.
        rng = np.random.default_rng(0)
        samples = [
            {
                "id": f"s{i}",
                "pos": [float(i // 4), float(i % 4)],
                "label": ("animals", "plants", "rocks")[i % 3],
                "features": [float(i % 3), rng.normal()],
            }
            for i in range(16)
        ]
        s = Session(
            two_level(),
            layout={"kind": "grid", "samples": samples},
            mode="similarity",
            config=quick_config(seed=9),
        )
        report = s.reports["root"]
        assert report.beta > 0.0 or report.breakdown.e_sd is not None
        s.expand("animals")  # would raise if the layout leaked into this level
        assert {"cat", "dog", "fox"} <= set(s.colors)


class TestExpansion:
    def test_visible_colors_survive_expansion_bit_for_bit(self):
        s = Session(two_level(), config=quick_config(seed=11))
        before = dict(s.colors)
        s.expand("animals")
        for cid, color in before.items():
            assert s.colors[cid] == color
        assert {"cat", "dog", "fox"} <= set(s.colors)

    def test_children_lie_inside_recorded_sphere(self, expanded_session):
        s = expanded_session
        for parent, kids in (("animals", ("cat", "dog", "fox")), ("plants", ("oak", "fern"))):
            sphere = s.contexts["root"].spheres.for_class(parent)
            lch = np.array([s.colors[k] for k in kids], dtype=float)
            assert sphere.contains_many(lch).all()

    def test_reexpansion_is_idempotent(self):
        s = Session(two_level(), config=quick_config(seed=13))
        first = s.expand("plants")
        again = s.expand("plants")
        assert first.colors == again.colors
        assert sum(e["node_id"] == "plants" for e in s.events) == 1

    def test_leaf_expansion_rejected(self, expanded_session):
        with pytest.raises(ExpansionError):
            expanded_session.expand("flint")

    def test_unknown_node_rejected(self, expanded_session):
        with pytest.raises(NotFoundError):
            expanded_session.expand("unicorns")

    def test_hidden_node_rejected_until_parent_expands(self):
        s = Session(three_level(), config=quick_config(seed=17))
        with pytest.raises(ExpansionError):
            s.expand("cat")  # grandchild level: not on screen yet
        s.expand("animals")
        s.expand("cat")
        assert {"kitten", "tomcat"} <= set(s.colors)

    def test_expansion_order_does_not_change_child_colors(self):
        a = Session(two_level(), config=quick_config(seed=19))
        a.expand("animals")
        a.expand("plants")
        b = Session(two_level(), config=quick_config(seed=19))
        b.expand("plants")
        b.expand("animals")
        assert a.colors == b.colors


class TestViews:
    def test_node_rows_follow_tree_order(self, expanded_session):
        rows = expanded_session.node_rows()
        ids = [r["id"] for r in rows]
        assert ids == [
            "animals", "cat", "dog", "fox",
            "plants", "oak", "fern",
            "rocks",
        ]
        by_id = {r["id"]: r for r in rows}
        assert by_id["cat"]["parent"] == "animals" and by_id["cat"]["depth"] == 1
        assert by_id["rocks"]["depth"] == 0 and not by_id["rocks"]["expanded"]
        assert by_id["animals"]["expanded"] and by_id["animals"]["has_children"]
        for r in rows:
            assert r["hex"] == to_hex(LchColor(*expanded_session.colors[r["id"]]))

    def test_palette_payload_metadata(self, expanded_session):
        payload = expanded_session.palette_payload()
        assert payload["session_id"] == "shared"
        assert payload["mode"] == "difference"
        assert payload["rng"] == RNG_ALGORITHM == "pcg64"
        assert payload["seed"] == 5
        assert len(payload["nodes"]) == 8

    def test_ranges_payload_reports_anchors_and_deltas(self, expanded_session):
        rows = expanded_session.ranges_payload("root")
        assert {r["class"] for r in rows} == {"animals", "plants", "rocks"}
        for r in rows:
            assert r["radius"] > 0
            assert r["anchor_delta"] >= 0.0
            assert set(r["anchor"]) == {"L", "C", "h"}

    def test_evaluation_payload_levels_and_frontier(self, expanded_session):
        payload = expanded_session.evaluation_payload()
        assert payload["rng"] == "pcg64"
        (level,) = payload["levels"]
        assert level["context"] == "root"
        assert set(level["classes"]) == {"cat", "dog", "fox", "oak", "fern"}
        report = level["report"]
        # two parents expanded in this context: both alignment metrics apply
        assert report["dr"] == 1.0
        assert report["ss"] > 0.0
        assert set(payload["frontier"]) >= {"pd", "nd", "hue", "cl", "bhdi"}

    def test_single_expanded_parent_reports_ratio_only(self):
        s = Session(two_level(), config=quick_config(seed=23))
        s.expand("animals")
        (level,) = s.evaluation_payload()["levels"]
        assert level["report"]["dr"] == 1.0
        assert "ss" not in level["report"]


class TestPersistence:
    def test_event_log_replay_is_bit_identical(self, expanded_session):
        log = expanded_session.to_event_log()
        clone = Session.replay(log)
        assert clone.colors == expanded_session.colors
        ours = json.dumps(expanded_session.palette_payload(), sort_keys=True)
        theirs = json.dumps(clone.palette_payload(), sort_keys=True)
        assert ours == theirs

    def test_event_log_round_trips_through_json(self, expanded_session):
        log = json.loads(json.dumps(expanded_session.to_event_log()))
        clone = Session.replay(log)
        assert clone.colors == expanded_session.colors

    def test_in_memory_layout_cannot_serialize(self):
        ids = tuple(f"s{i}" for i in range(9))
        pos = np.array([[i // 3, i % 3] for i in range(9)], dtype=float)
        labels = tuple(("animals", "plants", "rocks")[i % 3] for i in range(9))
        layout = build_neighbor_graph(SpatialLayout("grid", ids, pos, labels))
        s = Session(two_level(), layout=layout, config=quick_config())
        with pytest.raises(ConfigurationError):
            s.to_event_log()

    def test_config_json_round_trip(self):
        cfg = quick_config(seed=41, cooling_rate=0.9)
        assert config_from_json(config_to_json(cfg)) == cfg
        assert config_from_json(None) == OptimizerConfig()

    def test_replay_rejects_unknown_events(self, expanded_session):
        log = expanded_session.to_event_log()
        log["events"].append({"type": "recolor", "node_id": "rocks"})
        with pytest.raises(ConfigurationError):
            Session.replay(log)
