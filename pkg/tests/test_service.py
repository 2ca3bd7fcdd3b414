"""REST service tests.

Run against the app in-process.  The contract under test is the wire
format (LCh + hex on every color, session ids, status codes) and the
session semantics observable through HTTP: immutability of visible
colors across expansion, determinism for equal seeds, and serialized
access to one session from concurrent expand requests.
"""

import concurrent.futures
import json

import pytest
from fastapi.testclient import TestClient

from hiercolor.service import SessionStore, create_app
from hiercolor.session import Session
from hiercolor.optimizer import OptimizerConfig


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


@pytest.fixture()
def client():
    return TestClient(create_app(SessionStore()))


def create(client, **overrides):
    body = {"hierarchy": two_level(), "seed": 5}
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 201, resp.text
    return resp.json()


class TestCreate:
    def test_payload_shape(self, client):
        payload = create(client)
        assert payload["session_id"]
        assert payload["rng"] == "pcg64"
        assert payload["mode"] == "difference"
        assert payload["warnings"] == []
        nodes = payload["nodes"]
        assert [n["id"] for n in nodes] == ["animals", "plants", "rocks"]
        for n in nodes:
            assert set(n["color"]) == {"L", "C", "h"}
            assert n["hex"].startswith("#") and len(n["hex"]) == 7

    def test_same_seed_gives_identical_palettes(self, client):
        a = create(client, seed=17)
        b = create(client, seed=17)
        assert a["session_id"] != b["session_id"]
        assert json.dumps(a["nodes"], sort_keys=True) == json.dumps(
            b["nodes"], sort_keys=True
        )

    def test_invalid_hierarchy_rejected(self, client):
        resp = client.post("/sessions", json={"hierarchy": {"label": "no id"}})
        assert resp.status_code == 422

    def test_similarity_without_layout_rejected(self, client):
        resp = client.post(
            "/sessions", json={"hierarchy": two_level(), "mode": "similarity"}
        )
        assert resp.status_code == 422

    def test_explicit_config_accepted(self, client):
        cfg = OptimizerConfig(seed=3, iterations_per_temperature=60)
        from hiercolor.session import config_to_json

        payload = create(client, config=config_to_json(cfg), seed=None)
        assert payload["seed"] == 3


class TestExpand:
    def test_children_and_ranges_returned(self, client):
        sid = create(client)["session_id"]
        resp = client.post(f"/sessions/{sid}/expand", json={"node_id": "animals"})
        assert resp.status_code == 200, resp.text
        body = resp.json()
        assert body["node_id"] == "animals"
        assert [c["class"] for c in body["children"]] == ["cat", "dog", "fox"]
        for c in body["children"]:
            assert set(c["color"]) == {"L", "C", "h"} and c["hex"].startswith("#")
        ranges = {r["class"]: r for r in body["ranges"]}
        assert set(ranges) == {"animals", "plants", "rocks"}
        assert all(r["radius"] > 0 for r in ranges.values())

    def test_visible_colors_unchanged_over_the_wire(self, client):
        sid = create(client)["session_id"]
        before = client.get(f"/sessions/{sid}/palette").json()["nodes"]
        client.post(f"/sessions/{sid}/expand", json={"node_id": "plants"})
        after = client.get(f"/sessions/{sid}/palette").json()["nodes"]
        after_by_id = {n["id"]: n for n in after}
        for node in before:
            assert after_by_id[node["id"]]["color"] == node["color"]
            assert after_by_id[node["id"]]["hex"] == node["hex"]

    def test_unknown_session_and_node(self, client):
        assert (
            client.post("/sessions/ghost/expand", json={"node_id": "x"}).status_code
            == 404
        )
        sid = create(client)["session_id"]
        resp = client.post(f"/sessions/{sid}/expand", json={"node_id": "unicorn"})
        assert resp.status_code == 404

    def test_leaf_expansion_conflicts(self, client):
        sid = create(client)["session_id"]
        client.post(f"/sessions/{sid}/expand", json={"node_id": "animals"})
        resp = client.post(f"/sessions/{sid}/expand", json={"node_id": "cat"})
        assert resp.status_code == 409

    def test_concurrent_expands_serialize_cleanly(self, client):
        sid = create(client, seed=29)["session_id"]

        def hit(node_id):
            return client.post(f"/sessions/{sid}/expand", json={"node_id": node_id})

        with concurrent.futures.ThreadPoolExecutor(max_workers=2) as pool:
            futures = [pool.submit(hit, n) for n in ("animals", "plants")]
            codes = sorted(f.result().status_code for f in futures)
        assert codes == [200, 200]

        # per-node seed derivation makes the interleaving irrelevant: the
        # outcome must equal a sequential reference run
        reference = Session(two_level(), config=OptimizerConfig(seed=29))
        reference.expand("animals")
        reference.expand("plants")
        got = {
            n["id"]: n["color"]
            for n in client.get(f"/sessions/{sid}/palette").json()["nodes"]
        }
        want = {
            row["id"]: row["color"] for row in reference.node_rows()
        }
        assert got == want


class TestReadAndDelete:
    def test_palette_roundtrip(self, client):
        sid = create(client)["session_id"]
        payload = client.get(f"/sessions/{sid}/palette").json()
        assert payload["session_id"] == sid
        assert len(payload["nodes"]) == 3

    def test_evaluation_payload(self, client):
        sid = create(client)["session_id"]
        client.post(f"/sessions/{sid}/expand", json={"node_id": "animals"})
        client.post(f"/sessions/{sid}/expand", json={"node_id": "plants"})
        body = client.get(f"/sessions/{sid}/evaluation").json()
        (level,) = body["levels"]
        assert level["report"]["dr"] == 1.0
        assert level["report"]["ss"] > 0.0
        assert "frontier" in body

    def test_delete_then_404(self, client):
        sid = create(client)["session_id"]
        assert client.delete(f"/sessions/{sid}").status_code == 204
        assert client.get(f"/sessions/{sid}/palette").status_code == 404
        assert client.delete(f"/sessions/{sid}").status_code == 404
