import itertools

import pytest
from fastapi.testclient import TestClient

from prefsearch import catalog as cat, service, session as sm
from prefsearch.errors import PrefSearchError


@pytest.fixture()
def app_env(tmp_path):
    ticker = itertools.count(0, 250)
    config = service.ServiceConfig(
        catalog_path=str(cat.bundled_catalog_path()),
        log_dir=str(tmp_path / "logs"),
        clock_ms=lambda: next(ticker),
    )
    app = service.create_app(config)
    return TestClient(app), tmp_path / "logs"


@pytest.fixture()
def client(app_env):
    return app_env[0]


def start_session(client, engine="weighted", session_id=None):
    body = {"engine": engine}
    if session_id:
        body["session_id"] = session_id
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 200
    return resp.json()["session_id"]


def query_body(criteria, action="AddTerm", request_id=None):
    body = {"query_state": {"criteria": criteria}, "action": action}
    if request_id:
        body["request_id"] = request_id
    return body


BREAKFAST = {"criterion_id": "c1", "kind": "nominal", "weight": 1.0,
             "facet_id": "meal", "value": "breakfast"}


def test_ready_reports_catalog_hash(client, bundled_catalog):
    data = client.get("/ready").json()
    assert data["status"] == "ok"
    assert data["products"] == 150
    assert data["catalog_hash"] == cat.catalog_hash(bundled_catalog)


def test_missing_catalog_rejected(tmp_path):
    config = service.ServiceConfig(catalog_path=str(tmp_path / "nope.json"),
                                   log_dir=str(tmp_path))
    with pytest.raises(PrefSearchError):
        service.create_app(config)


def test_product_lookup(client, bundled_catalog):
    resp = client.get("/catalog/products/h019")
    assert resp.status_code == 200
    assert resp.json()["product_id"] == "h019"
    assert client.get("/catalog/products/h999").status_code == 404


def test_suggest_endpoint(client):
    data = client.get("/suggest", params={"prefix": "brea"}).json()
    assert data["suggestions"][0]["text"] == "breakfast"
    data = client.get("/suggest", params={"prefix": "", "limit": 3}).json()
    assert len(data["suggestions"]) == 3


def test_unknown_engine_rejected(client):
    assert client.post("/sessions", json={"engine": "psychic"}).status_code == 400


def test_duplicate_session_id_rejected(client):
    start_session(client, session_id="dup")
    assert client.post("/sessions",
                       json={"engine": "weighted", "session_id": "dup"}).status_code == 400


def test_weighted_query_filters_like_engine(client, bundled_catalog):
    sid = start_session(client)
    resp = client.post(f"/sessions/{sid}/query", json=query_body([BREAKFAST]))
    assert resp.status_code == 200
    page = resp.json()["page"]
    expected = sum(1 for p in bundled_catalog.products
                   if "breakfast" in p.nominal_features.get("meal", ()))
    assert page["total_count"] == expected
    assert len(page["items"]) == min(15, expected)


def test_malformed_weight_rejected_without_event(app_env):
    client, log_dir = app_env
    sid = start_session(client, session_id="badweight")
    bad = dict(BREAKFAST, weight=1.5)
    resp = client.post(f"/sessions/{sid}/query", json=query_body([bad]))
    assert resp.status_code == 400
    log = sm.load_session_log(log_dir / "badweight.ndjson")
    assert log.events == []


def test_idempotent_retry_appends_single_event(app_env):
    client, log_dir = app_env
    sid = start_session(client, session_id="retry")
    body = query_body([BREAKFAST], request_id="req-1")
    first = client.post(f"/sessions/{sid}/query", json=body).json()
    second = client.post(f"/sessions/{sid}/query", json=body).json()
    assert first == second
    log = sm.load_session_log(log_dir / "retry.ndjson")
    assert len(log.events) == 1


def test_two_interleaved_sessions_write_two_logs(app_env):
    client, log_dir = app_env
    a = start_session(client, session_id="a")
    b = start_session(client, engine="faceted", session_id="b")
    client.post(f"/sessions/{a}/query", json=query_body([BREAKFAST]))
    client.post(f"/sessions/{b}/selection",
                json={"selection": {"selected": [{"facet_id": "meal", "value": "breakfast"}],
                                    "sort": "relevance"}})
    client.post(f"/sessions/{a}/query",
                json=query_body([dict(BREAKFAST, weight=0.9)], action="SetWeight"))
    log_a = sm.load_session_log(log_dir / "a.ndjson")
    log_b = sm.load_session_log(log_dir / "b.ndjson")
    assert [e.action for e in log_a.events] == ["AddTerm", "SetWeight"]
    assert [e.action for e in log_b.events] == ["SelectFacet"]
    assert all(e.session_id == "a" for e in log_a.events)


def test_select_closes_session(client):
    sid = start_session(client)
    client.post(f"/sessions/{sid}/query", json=query_body([BREAKFAST]))
    resp = client.post(f"/sessions/{sid}/select", json={"product_id": "h019"})
    assert resp.status_code == 200
    after = client.post(f"/sessions/{sid}/query", json=query_body([BREAKFAST]))
    assert after.status_code == 409


def test_select_retry_is_idempotent(app_env):
    client, log_dir = app_env
    sid = start_session(client, session_id="sel")
    body = {"product_id": "h019", "request_id": "r9"}
    assert client.post(f"/sessions/{sid}/select", json=body).status_code == 200
    assert client.post(f"/sessions/{sid}/select", json=body).status_code == 200
    log = sm.load_session_log(log_dir / "sel.ndjson")
    assert len(log.events) == 1 and log.final_selection == "h019"


def test_next_page_extends_visible_prefix(app_env):
    client, log_dir = app_env
    sid = start_session(client, session_id="pages")
    client.post(f"/sessions/{sid}/query", json=query_body([]))
    resp = client.post(f"/sessions/{sid}/page", json={"page_index": 1})
    assert len(resp.json()["page"]["items"]) == 15
    log = sm.load_session_log(log_dir / "pages.ndjson")
    assert log.events[-1].action == "NextPage"
    assert len(log.events[-1].visible_ids) == 30
    # re-fetching an already visible page appends nothing
    client.post(f"/sessions/{sid}/page", json={"page_index": 0})
    log = sm.load_session_log(log_dir / "pages.ndjson")
    assert len(log.events) == 2


def test_facet_counts_endpoint(client, bundled_catalog):
    sid = start_session(client, engine="faceted")
    client.post(f"/sessions/{sid}/selection",
                json={"selection": {"selected": [{"facet_id": "neighborhood", "value": "Mitte"}],
                                    "sort": "relevance"}})
    data = client.get(f"/sessions/{sid}/facet-counts").json()
    counts = {(c["facet_id"], c["value"]): c["count"] for c in data["counts"]}
    mitte = sum(1 for p in bundled_catalog.products
                if "Mitte" in p.nominal_features.get("neighborhood", ()))
    assert counts[("neighborhood", "Mitte")] == mitte


def test_facet_endpoints_reject_weighted_sessions(client):
    sid = start_session(client)
    assert client.get(f"/sessions/{sid}/facet-counts").status_code == 400
    assert client.post(f"/sessions/{sid}/selection",
                       json={"selection": {"selected": [], "sort": "relevance"}}
                       ).status_code == 400


def test_unknown_session_404(client):
    assert client.post("/sessions/ghost/query", json=query_body([])).status_code == 404


def test_eval_report_endpoint(app_env, tmp_path):
    client, log_dir = app_env
    sid = start_session(client, session_id="evalme")
    client.post(f"/sessions/{sid}/query", json=query_body([BREAKFAST]))
    client.post(f"/sessions/{sid}/query",
                json=query_body([dict(BREAKFAST, weight=0.9)], action="SetWeight"))
    client.post(f"/sessions/{sid}/page", json={"page_index": 1})
    client.post(f"/sessions/{sid}/select", json={"product_id": "h019"})
    out = tmp_path / "report"
    resp = client.post("/eval/report", json={"out_dir": str(out)})
    assert resp.status_code == 200
    data = resp.json()
    assert data["errors"] == []
    assert "evalme" in data["sessions"]
    assert (out / "recall.csv").exists()
    assert (out / "ndcg_series.csv").exists()


def test_logs_replay_cleanly(app_env, bundled_catalog):
    client, log_dir = app_env
    sid = start_session(client, session_id="replayme")
    client.post(f"/sessions/{sid}/query", json=query_body([BREAKFAST]))
    client.post(f"/sessions/{sid}/page", json={"page_index": 1})
    client.post(f"/sessions/{sid}/select", json={"product_id": "h019"})
    log = sm.load_session_log(log_dir / "replayme.ndjson")
    sm.replay(log, bundled_catalog)
