"""HTTP surface: endpoint behavior, error mapping, persistence, ownership."""

from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from kcat.analytics import AnnotationFile, accuracy_matrix, integrate
from kcat.config import ProjectConfig
from kcat.service import create_app

ALICE = {"annotator": "alice"}


@pytest.fixture()
def config(small_kb_dir, small_corpus_file, tmp_path) -> ProjectConfig:
    return ProjectConfig(
        kb_dir=small_kb_dir,
        corpus_file=small_corpus_file,
        data_dir=tmp_path / "data",
    )


@pytest.fixture()
def client(config):
    with TestClient(create_app(config)) as c:
        yield c


def open_sess(client, doc_id="d2", annotator="alice"):
    resp = client.post("/sessions", json={"annotator": annotator, "doc_id": doc_id})
    assert resp.status_code == 200
    return resp.json()["session_id"]


def label_liverpool(client, sid):
    client.post(f"/sessions/{sid}/mentions/d2-m0/select-type",
                json={**ALICE, "type": "/organization"})
    client.post(f"/sessions/{sid}/mentions/d2-m0/revise",
                json={**ALICE, "entity": "QCLUB"})
    client.post(f"/sessions/{sid}/mentions/d2-m0/label",
                json={**ALICE, "type": "/organization/club"})


class TestBasics:
    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok", "types": 12, "docs": 3}

    def test_docs_listing(self, client):
        docs = client.get("/docs").json()["documents"]
        assert {d["doc_id"] for d in docs} == {"d1", "d2", "d3"}
        doc = client.get("/docs/d1").json()
        assert doc["text"].startswith("Kobe")
        assert doc["mentions"][0]["surface"] == "Kobe"

    def test_unknown_doc_404(self, client):
        resp = client.get("/docs/zzz")
        assert resp.status_code == 404
        assert resp.json()["error"] == "UnknownDoc"

    def test_session_view_carries_hint_data(self, client):
        sid = open_sess(client)
        view = client.get(f"/sessions/{sid}").json()
        mention = view["mentions"][0]
        assert mention["predicted"] == "QCITY"
        by_id = {c["entity"]: c for c in mention["candidates"]}
        assert "football club" in by_id["QCLUB"]["description"]
        offered = {t["path"]: t["definition"] for t in mention["offered_types"]}
        assert offered["/organization"].startswith("a group of people")
        assert list(offered) == sorted(offered)

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope").status_code == 404

    def test_validation_error_maps_to_400(self, client):
        resp = client.post("/sessions", json={"annotator": "alice"})
        assert resp.status_code == 400
        assert resp.json()["error"] == "ValidationError"


class TestMutations:
    def test_liverpool_walkthrough(self, client):
        sid = open_sess(client)
        resp = client.post(f"/sessions/{sid}/mentions/d2-m0/select-type",
                           json={**ALICE, "type": "/organization"})
        assert resp.status_code == 200
        survivors = resp.json()["mentions"][0]["candidates"]
        assert [c["entity"] for c in survivors] == ["QCLUB"]

        resp = client.post(f"/sessions/{sid}/mentions/d2-m0/revise",
                           json={**ALICE, "entity": "QCLUB"})
        assert resp.json()["mentions"][0]["phase"] == "Revised"

        resp = client.post(f"/sessions/{sid}/mentions/d2-m0/label",
                           json={**ALICE, "type": "/organization/club"})
        state = resp.json()["mentions"][0]
        assert state["phase"] == "Labeled"
        assert state["final_label"] == "/organization/club"
        assert state["final_entity"] == "QCLUB"

    def test_not_in_chain_409(self, client):
        sid = open_sess(client)
        client.post(f"/sessions/{sid}/mentions/d2-m0/select-type",
                    json={**ALICE, "type": "/organization"})
        resp = client.post(f"/sessions/{sid}/mentions/d2-m0/select-type",
                           json={**ALICE, "type": "/organization"})
        assert resp.status_code == 409
        assert resp.json()["error"] == "NotInChain"

    def test_not_offered_409(self, client):
        sid = open_sess(client, doc_id="d1")
        resp = client.post(f"/sessions/{sid}/mentions/d1-m0/label",
                           json={**ALICE, "type": "/organization"})
        assert resp.status_code == 409
        assert resp.json()["error"] == "NotOffered"

    def test_unknown_type_404(self, client):
        sid = open_sess(client, doc_id="d1")
        resp = client.post(f"/sessions/{sid}/mentions/d1-m0/label",
                           json={**ALICE, "type": "/nope"})
        assert resp.status_code == 404
        assert resp.json()["error"] == "UnknownType"

    def test_undo_redo_reset(self, client):
        sid = open_sess(client)
        label_liverpool(client, sid)
        resp = client.post(f"/sessions/{sid}/undo", json=ALICE)
        assert resp.json()["mentions"][0]["final_label"] is None
        resp = client.post(f"/sessions/{sid}/redo", json=ALICE)
        assert resp.json()["mentions"][0]["final_label"] == "/organization/club"
        resp = client.post(f"/sessions/{sid}/reset", json=ALICE)
        assert resp.json()["mentions"][0]["phase"] == "Linked"

    def test_reset_single_mention(self, client):
        sid = open_sess(client, doc_id="d3")
        client.post(f"/sessions/{sid}/mentions/d3-m0/label",
                    json={**ALICE, "type": "/other"})
        client.post(f"/sessions/{sid}/mentions/d3-m1/label",
                    json={**ALICE, "type": "/person/artist/singer"})
        resp = client.post(f"/sessions/{sid}/reset",
                           json={**ALICE, "mention_id": "d3-m0"})
        states = {m["mention_id"]: m for m in resp.json()["mentions"]}
        assert states["d3-m0"]["final_label"] is None
        assert states["d3-m1"]["final_label"] == "/person/artist/singer"

    def test_empty_history_409(self, client):
        sid = open_sess(client)
        resp = client.post(f"/sessions/{sid}/undo", json=ALICE)
        assert resp.status_code == 409
        assert resp.json()["error"] == "EmptyHistory"

    def test_ownership_enforced(self, client):
        sid = open_sess(client, annotator="alice")
        resp = client.post(f"/sessions/{sid}/mentions/d2-m0/select-type",
                           json={"annotator": "mallory", "type": "/organization"})
        assert resp.status_code == 409
        assert resp.json()["error"] == "NotOwner"

    def test_concurrent_mutation_409(self, client):
        sid = open_sess(client)
        state = client.app.state.service
        acquired = state.locks[sid].acquire(blocking=False)
        assert acquired
        try:
            resp = client.post(f"/sessions/{sid}/mentions/d2-m0/select-type",
                               json={**ALICE, "type": "/organization"})
            assert resp.status_code == 409
            assert resp.json()["error"] == "SessionBusy"
        finally:
            state.locks[sid].release()


class TestPersistence:
    def test_write_ahead_appends_one_line_per_mutation(self, client, config):
        sid = open_sess(client)
        log = config.data_dir / f"{sid}.jsonl"
        assert len(log.read_text().splitlines()) == 1  # header
        label_liverpool(client, sid)
        assert len(log.read_text().splitlines()) == 4
        # a rejected mutation must not append
        resp = client.post(f"/sessions/{sid}/mentions/d2-m0/select-type",
                           json={**ALICE, "type": "/nope"})
        assert resp.status_code == 404
        assert len(log.read_text().splitlines()) == 4

    def test_restart_replays_sessions(self, config):
        with TestClient(create_app(config)) as client:
            sid = open_sess(client)
            label_liverpool(client, sid)          # 3 commands
            client.post(f"/sessions/{sid}/undo", json=ALICE)
            client.post(f"/sessions/{sid}/redo", json=ALICE)
            client.post(f"/sessions/{sid}/undo", json=ALICE)  # 5th logged action
            before = client.get(f"/sessions/{sid}").json()

        with TestClient(create_app(config)) as restarted:
            after = restarted.get(f"/sessions/{sid}").json()
            assert after == before
            # and the replayed session still mutates correctly
            resp = restarted.post(f"/sessions/{sid}/redo", json=ALICE)
            assert resp.status_code == 200
            assert resp.json()["mentions"][0]["final_label"] == "/organization/club"


class TestExportEndpoints:
    def test_txt_export(self, client):
        sid = open_sess(client, doc_id="d1")
        client.post(f"/sessions/{sid}/mentions/d1-m0/label",
                    json={**ALICE, "type": "/person/athlete"})
        resp = client.get(f"/sessions/{sid}/export", params={"format": "txt"})
        assert resp.text == "[@Kobe#/person/athlete*] scored 60 points in the final game."

    def test_json_export_matches_module_renderer(self, client):
        from kcat.session import render_json
        sid = open_sess(client)
        label_liverpool(client, sid)
        resp = client.get(f"/sessions/{sid}/export", params={"format": "json"})
        sess = client.app.state.service.sessions[sid]
        assert resp.content == render_json(sess).encode("utf-8")

    def test_bad_format_400(self, client):
        sid = open_sess(client)
        resp = client.get(f"/sessions/{sid}/export", params={"format": "xml"})
        assert resp.status_code == 400
        assert resp.json()["error"] == "UnknownFormat"

    def test_http_exports_feed_the_manage_cli(self, client, tmp_path, capsys):
        from kcat.cli import main

        files = []
        for annotator in ("alice", "bob"):
            sid = open_sess(client, doc_id="d1", annotator=annotator)
            client.post(f"/sessions/{sid}/mentions/d1-m0/label",
                        json={"annotator": annotator, "type": "/person/athlete"})
            resp = client.get(f"/sessions/{sid}/export", params={"format": "json"})
            path = tmp_path / f"{annotator}.json"
            path.write_bytes(resp.content)
            files.append(str(path))

        assert main(["manage", "matrix", *files]) == 0
        matrix = json.loads(capsys.readouterr().out)
        assert matrix["cells"] == [[1.0, 1.0], [1.0, 1.0]]


class TestManageEndpoints:
    def _two_disagreeing_sessions(self, client):
        sid_a = open_sess(client, doc_id="d1", annotator="alice")
        client.post(f"/sessions/{sid_a}/mentions/d1-m0/label",
                    json={"annotator": "alice", "type": "/person/athlete"})
        sid_b = open_sess(client, doc_id="d1", annotator="bob")
        client.post(f"/sessions/{sid_b}/mentions/d1-m0/label",
                    json={"annotator": "bob", "type": "/person"})
        return sid_a, sid_b

    def test_matrix_matches_analytics(self, client):
        sid_a, sid_b = self._two_disagreeing_sessions(client)
        resp = client.get("/manage/matrix", params={"sessions": f"{sid_a},{sid_b}"})
        expected = accuracy_matrix([
            AnnotationFile("alice", "d1", {"d1-m0": "/person/athlete"}),
            AnnotationFile("bob", "d1", {"d1-m0": "/person"}),
        ]).to_dict()
        assert resp.json() == expected

    def test_errors_report_tex_and_json(self, client):
        sid_a, sid_b = self._two_disagreeing_sessions(client)
        tex = client.get("/manage/errors",
                         params={"gold": sid_a, "pred": sid_b}).text
        assert tex.startswith(r"\documentclass")
        assert r"\textcolor{blue}{Kobe}" in tex  # NotSpecific
        counts = client.get("/manage/errors", params={
            "gold": sid_a, "pred": sid_b, "format": "json"}).json()["counts"]
        assert counts == {"Correct": 0, "OverSpecific": 0, "NotSpecific": 1,
                          "IncorrectPath": 0}

    def test_integrate(self, client, small_kb):
        sid_a, sid_b = self._two_disagreeing_sessions(client)
        sid_c = open_sess(client, doc_id="d1", annotator="carol")
        client.post(f"/sessions/{sid_c}/mentions/d1-m0/label",
                    json={"annotator": "carol", "type": "/person/athlete"})
        resp = client.post("/manage/integrate",
                           json={"sessions": [sid_a, sid_b, sid_c]})
        expected = integrate(small_kb.hierarchy, [
            AnnotationFile("alice", "d1", {"d1-m0": "/person/athlete"}),
            AnnotationFile("bob", "d1", {"d1-m0": "/person"}),
            AnnotationFile("carol", "d1", {"d1-m0": "/person/athlete"}),
        ]).to_dict()
        assert resp.json() == expected
        assert resp.json()["labels"]["d1-m0"] == "/person/athlete"

    def test_matrix_too_few_400(self, client):
        sid = open_sess(client)
        resp = client.get("/manage/matrix", params={"sessions": sid})
        assert resp.status_code == 400
        assert resp.json()["error"] == "TooFewAnnotators"


class TestStaticUi:
    def test_ui_dir_mounted_when_configured(self, small_kb_dir, small_corpus_file,
                                            tmp_path):
        ui_dir = tmp_path / "dist"
        ui_dir.mkdir()
        (ui_dir / "index.html").write_text("<html><body>kcat ui</body></html>",
                                           encoding="utf-8")
        cfg = ProjectConfig(kb_dir=small_kb_dir, corpus_file=small_corpus_file,
                            data_dir=tmp_path / "data", ui_dir=ui_dir)
        with TestClient(create_app(cfg)) as client:
            resp = client.get("/ui/")
            assert resp.status_code == 200
            assert "kcat ui" in resp.text
            # API routes are unaffected by the mount
            assert client.get("/health").status_code == 200


class TestStats:
    def test_reduction_endpoint_matches_cli(self, bbn_fixture, tmp_path, capsys):
        from conftest import build_bbn_shaped, write_corpus, write_kb
        from kcat.cli import main

        types, entities, aliases, docs = build_bbn_shaped()
        kb_dir = write_kb(tmp_path / "kb", types, entities, aliases)
        corpus_file = write_corpus(tmp_path / "corpus.json", docs)
        cfg = ProjectConfig(kb_dir=kb_dir, corpus_file=corpus_file,
                            data_dir=tmp_path / "data")
        with TestClient(create_app(cfg)) as client:
            http_report = client.get("/stats/reduction").json()

        assert main(["stats", "--kb", str(kb_dir), "--corpus", str(corpus_file)]) == 0
        cli_report = json.loads(capsys.readouterr().out)
        assert cli_report == http_report
        assert http_report["total_types"] == 47
