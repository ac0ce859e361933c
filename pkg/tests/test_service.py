import json

import pytest
from fastapi.testclient import TestClient

from conftest import build_fresh_store, seeded_rng
from ecbw.engine import SessionEngine
from ecbw.service import ServiceConfig, _StorePersister, create_app, load_allowlist, open_store
from ecbw.store import IdeaStore, StoreConfig


def make_client(store=None, allowlist=None, persister=None, seed=0, topic="topic?", strategy="ecbw"):
    store = store or build_fresh_store(family_count=12, per_family=3)
    engine = SessionEngine(store, strategy, rng=seeded_rng(seed))
    app = create_app(
        engine,
        topic=topic,
        instructions="vote then write",
        allowlist=allowlist,
        persister=persister,
    )
    return TestClient(app), engine, store


def submit_payload(view, votes=((0, 0), (1, 0)), idea_columns=(0, 1, 2)):
    return {
        "session_id": view["session_id"],
        "votes": [{"column": c, "row": r} for c, r in votes],
        "ideas": [{"column": c, "text": f"reply {c}"} for c in idea_columns],
    }


class TestLogin:
    def test_initial_phase_on_fresh_store(self):
        client, _, _ = make_client(store=IdeaStore(StoreConfig()))
        response = client.post("/api/login", json={"participant_no": 1})
        assert response.status_code == 200
        body = response.json()
        assert body["phase"] == "initial"
        assert body["grid"] == []
        assert body["entry_slots"] == 3
        assert body["topic"] == "topic?"

    def test_stimulus_phase_with_populated_grid(self):
        client, _, store = make_client()
        body = client.post("/api/login", json={"participant_no": 7}).json()
        assert body["phase"] == "stimulus"
        assert len(body["grid"]) == 3
        for column in body["grid"]:
            assert 1 <= len(column["cells"]) <= 3
            for cell in column["cells"]:
                assert cell["text"] == store.get(cell["idea_id"]).text

    def test_terminated_store_refused(self):
        store = build_fresh_store(family_count=3, per_family=1, target=3)
        client, _, _ = make_client(store=store)
        response = client.post("/api/login", json={"participant_no": 1})
        assert response.status_code == 409
        assert response.json()["code"] == "terminated"

    def test_nonpositive_participant(self):
        client, _, _ = make_client()
        response = client.post("/api/login", json={"participant_no": 0})
        assert response.status_code == 400
        assert response.json()["code"] == "bad_participant"

    def test_malformed_body(self):
        client, _, _ = make_client()
        response = client.post("/api/login", json={"participant_no": "seven"})
        assert response.status_code == 422
        body = response.json()
        assert set(body) == {"code", "message"}

    def test_allowlist_gates_unknown_numbers(self):
        client, _, _ = make_client(allowlist={5, 6})
        assert client.post("/api/login", json={"participant_no": 5}).status_code == 200
        response = client.post("/api/login", json={"participant_no": 7})
        assert response.status_code == 403
        assert response.json()["code"] == "not_allowed"


class TestSubmit:
    def test_full_round_trip_increases_n(self):
        client, _, store = make_client()
        n_before = client.get("/api/status").json()["n"]
        view = client.post("/api/login", json={"participant_no": 7}).json()
        votes = [(0, 0), (0, 1), (1, 0), (2, 0)]
        response = client.post("/api/submit", json=submit_payload(view, votes=votes))
        assert response.status_code == 200
        body = response.json()
        assert body["n"] == n_before + 3 and body["terminated"] is False
        assert client.get("/api/status").json()["n"] == n_before + 3

    def test_replay_rejected(self):
        client, _, _ = make_client()
        view = client.post("/api/login", json={"participant_no": 7}).json()
        payload = submit_payload(view)
        assert client.post("/api/submit", json=payload).status_code == 200
        response = client.post("/api/submit", json=payload)
        assert response.status_code == 409
        assert response.json()["code"] == "already_submitted"

    def test_unknown_session(self):
        client, _, _ = make_client()
        response = client.post(
            "/api/submit",
            json={"session_id": "bogus", "votes": [], "ideas": []},
        )
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_session"

    def test_vote_on_empty_cell(self):
        store = build_fresh_store(family_count=12, per_family=1)
        client, _, _ = make_client(store=store)
        view = client.post("/api/login", json={"participant_no": 7}).json()
        payload = submit_payload(view, votes=((0, 2),), idea_columns=())
        response = client.post("/api/submit", json=payload)
        assert response.status_code == 422
        assert response.json()["code"] == "invalid_submission"

    def test_two_ideas_for_one_column(self):
        client, _, _ = make_client()
        view = client.post("/api/login", json={"participant_no": 7}).json()
        payload = submit_payload(view, idea_columns=())
        payload["ideas"] = [
            {"column": 0, "text": "a"},
            {"column": 0, "text": "b"},
        ]
        response = client.post("/api/submit", json=payload)
        assert response.status_code == 422

    def test_initial_phase_round_trip(self):
        client, _, store = make_client(store=IdeaStore(StoreConfig()))
        view = client.post("/api/login", json={"participant_no": 2}).json()
        assert view["phase"] == "initial"
        response = client.post("/api/submit", json=submit_payload(view, votes=()))
        assert response.status_code == 200
        assert response.json()["n"] == 3
        assert store.get(1).participant_no == 2


class TestStatus:
    def test_shape(self):
        client, _, _ = make_client(strategy="obw")
        body = client.get("/api/status").json()
        assert body == {
            "n": 36,
            "N": 210,
            "N_f": 12,
            "terminated": False,
            "strategy": "obw",
        }


class TestPersistence:
    def test_commits_append_to_log_file(self, tmp_path):
        path = tmp_path / "live.jsonl"
        store = build_fresh_store(family_count=12, per_family=3)
        store.save(path)
        persister = _StorePersister(store, path)
        client, _, _ = make_client(store=store, persister=persister)
        view = client.post("/api/login", json={"participant_no": 7}).json()
        client.post("/api/submit", json=submit_payload(view))
        reloaded = IdeaStore.load(path)
        assert reloaded.dumps() == store.dumps()
        assert reloaded.n == 39

    def test_open_store_creates_missing_file(self, tmp_path):
        path = tmp_path / "fresh.jsonl"
        store = open_store(path, target_idea_count=30, family_count=5)
        assert path.exists()
        assert store.config.family_count == 5
        again = open_store(path)
        assert again.config.family_count == 5  # loaded, not recreated


class TestHttpAddsNoBehavior:
    def test_same_script_same_log_as_direct_engine_use(self):
        script = [
            (7, [(0, 0), (1, 1)], {0: "idea a", 1: "idea b", 2: "idea c"}),
            (8, [], {0: "idea d"}),
            (9, [(2, 0)], {1: "idea e", 2: "idea f"}),
        ]

        http_store = build_fresh_store(family_count=12, per_family=3)
        client, _, _ = make_client(store=http_store, seed=123)
        for participant, votes, ideas in script:
            view = client.post(
                "/api/login", json={"participant_no": participant}
            ).json()
            payload = {
                "session_id": view["session_id"],
                "votes": [{"column": c, "row": r} for c, r in votes],
                "ideas": [
                    {"column": c, "text": t} for c, t in sorted(ideas.items())
                ],
            }
            assert client.post("/api/submit", json=payload).status_code == 200

        from ecbw.engine import Submission

        direct_store = build_fresh_store(family_count=12, per_family=3)
        engine = SessionEngine(direct_store, "ecbw", rng=seeded_rng(123))
        for participant, votes, ideas in script:
            session = engine.login(participant)
            engine.commit(
                session.session_id,
                Submission(voted_cells=set(votes), new_ideas=ideas),
            )

        assert http_store.dumps() == direct_store.dumps()


class TestServiceConfig:
    def test_from_json_with_env_overrides(self, tmp_path, monkeypatch):
        path = tmp_path / "service.json"
        path.write_text(
            json.dumps(
                {
                    "store_path": "a.jsonl",
                    "strategy": "hybrid",
                    "topic": "t",
                    "port": 9001,
                }
            ),
            encoding="utf-8",
        )
        monkeypatch.setenv("ECBW_PORT", "9999")
        monkeypatch.setenv("ECBW_STORE_PATH", "b.jsonl")
        config = ServiceConfig.from_json_file(path)
        assert config.port == 9999
        assert config.store_path == "b.jsonl"
        assert config.strategy == "hybrid"

    def test_missing_store_path_rejected(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text("{}", encoding="utf-8")
        with pytest.raises(ValueError):
            ServiceConfig.from_json_file(path)

    def test_allowlist_parsing(self, tmp_path):
        path = tmp_path / "allow.txt"
        path.write_text("1\n2  # organizer\n\n# comment\n17\n", encoding="utf-8")
        assert load_allowlist(path) == {1, 2, 17}
