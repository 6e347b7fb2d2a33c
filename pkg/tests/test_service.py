import json

import pytest
from fastapi.testclient import TestClient

from scholarmetrics import bibtrail, ops
from scholarmetrics.corpus import FilterSpec, filter_corpus
from scholarmetrics.service import create_app

from conftest import SCI3_CSV, build_t5_corpus


@pytest.fixture()
def client(tmp_path):
    app = create_app(data_dir=tmp_path / "data")
    with TestClient(app) as c:
        yield c


def login(client, email="alice@example.org"):
    resp = client.post("/auth/login", json={"email": email})
    assert resp.status_code == 200
    return {"Authorization": f"Bearer {resp.json()['token']}"}


def make_project(client, headers, t5_csv, kind="scopus", build=True):
    pid = client.post("/projects", headers=headers).json()["project_id"]
    resp = client.post(f"/projects/{pid}/files", headers=headers,
                       files=[("files", ("t5.csv", t5_csv, "text/csv"))],
                       data={"kind": kind})
    assert resp.status_code == 200, resp.text
    if build:
        resp = client.post(f"/projects/{pid}/build", headers=headers)
        assert resp.status_code == 200, resp.text
    return pid


def test_login_rejects_bad_email(client):
    assert client.post("/auth/login", json={"email": "nope"}).status_code == 422


def test_requests_without_token_401(client):
    assert client.get("/projects").status_code == 401
    assert client.post("/projects").status_code == 401
    assert client.get("/projects", headers={"Authorization": "Bearer junk"}).status_code == 401


def test_upload_reports_table_and_mapping(client, t5_csv):
    headers = login(client)
    pid = client.post("/projects", headers=headers).json()["project_id"]
    resp = client.post(f"/projects/{pid}/files", headers=headers,
                       files=[("files", ("t5.csv", t5_csv, "text/csv"))],
                       data={"kind": "scopus"})
    body = resp.json()["files"][0]
    assert body["n_rows"] == 5
    assert body["inferred_mapping"]["assignments"]["title"] == "Title"
    assert body["inferred_mapping"]["assignments"]["citations"] == "Cited by"


def test_build_and_preview(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    resp = client.get(f"/projects/{pid}/preview", params={"n": 10}, headers=headers)
    body = resp.json()
    assert body["total"] == 5
    assert len(body["records"]) == 5           # corpus smaller than n
    assert body["records"][0]["title"] == "Graph methods for citation data"


def test_build_without_files_409(client):
    headers = login(client)
    pid = client.post("/projects", headers=headers).json()["project_id"]
    assert client.post(f"/projects/{pid}/build", headers=headers).status_code == 409


def test_preview_before_build_409(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv, build=False)
    assert client.get(f"/projects/{pid}/preview", headers=headers).status_code == 409


def test_project_isolation(client, t5_csv):
    alice = login(client, "alice@example.org")
    bob = login(client, "bob@example.org")
    pid = make_project(client, alice, t5_csv)
    assert client.get(f"/projects/{pid}/preview", headers=bob).status_code == 404
    assert client.post(f"/projects/{pid}/build", headers=bob).status_code == 404
    assert pid not in [p["project_id"] for p in
                       client.get("/projects", headers=bob).json()["projects"]]


def test_mapping_round_trip(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv, build=False)
    mapping = client.post(f"/projects/{pid}/files", headers=headers,
                          files=[("files", ("t5b.csv", t5_csv, "text/csv"))],
                          data={"kind": "scopus"}).json()["files"][0]["inferred_mapping"]
    body = {**mapping, "source_label": "t5b.csv"}
    resp = client.put(f"/projects/{pid}/mapping", headers=headers, json=body)
    assert resp.status_code == 200
    assert resp.json()["mapping"] == mapping


def test_mapping_validation_rejected(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv, build=False)
    bad = {"assignments": {"title": "No Such Column"}}
    resp = client.put(f"/projects/{pid}/mapping", headers=headers, json=bad)
    assert resp.status_code == 422
    assert resp.json()["error"] == "MappingRejected"


def test_filters_endpoint(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    resp = client.put(f"/projects/{pid}/filters", headers=headers,
                      json={"year_range": [2020, 2021]})
    assert resp.json()["stats"]["n_records"] == 3
    resp = client.put(f"/projects/{pid}/filters", headers=headers,
                      json={"year_range": [2025, 2020]})
    assert resp.status_code == 422


def test_analyze_matches_library_bytes(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    resp = client.post(f"/projects/{pid}/analyze", headers=headers,
                       json={"module": "bibtrail", "operation": "publications_series",
                             "params": {"mode": "total"}})
    assert resp.status_code == 200
    direct = bibtrail.publications_series(build_t5_corpus(t5_csv), "total")
    assert ops.canonical_json(resp.json()["result"]) == \
        ops.canonical_json(ops.to_json_obj(direct))


def test_analyze_respects_filters(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    client.put(f"/projects/{pid}/filters", headers=headers,
               json={"year_range": [2020, 2021]})
    resp = client.post(f"/projects/{pid}/analyze", headers=headers,
                       json={"module": "bibtrail", "operation": "publications_series",
                             "params": {"mode": "total"}})
    direct = bibtrail.publications_series(
        filter_corpus(build_t5_corpus(t5_csv), FilterSpec(year_range=(2020, 2021))),
        "total")
    assert ops.canonical_json(resp.json()["result"]) == \
        ops.canonical_json(ops.to_json_obj(direct))


def test_analyze_result_cached(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    body = {"module": "themantix", "operation": "keyword_frequencies", "params": {"n": 5}}
    first = client.post(f"/projects/{pid}/analyze", headers=headers, json=body).json()
    second = client.post(f"/projects/{pid}/analyze", headers=headers, json=body).json()
    assert first == second
    assert first["result_id"] == second["result_id"]


def test_unknown_operation_422(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    resp = client.post(f"/projects/{pid}/analyze", headers=headers,
                       json={"module": "bibtrail", "operation": "nope"})
    assert resp.status_code == 422


def test_scimago_upload_enables_quartiles(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    body = {"module": "bibtrail", "operation": "journal_analysis",
            "params": {"mode": "quartile_counts"}}
    resp = client.post(f"/projects/{pid}/analyze", headers=headers, json=body)
    assert resp.status_code == 422             # no scimago file yet
    up = client.post(f"/projects/{pid}/files", headers=headers,
                     files=[("files", ("scimago.csv", SCI3_CSV, "text/csv"))],
                     data={"kind": "scimago"})
    assert up.json()["files"][0]["n_journals"] == 3
    resp = client.post(f"/projects/{pid}/analyze", headers=headers, json=body)
    rows = dict((r[0], r[1]) for r in resp.json()["result"]["rows"])
    assert rows == {"Q1": 2, "Q2": 1, "Q3": 0, "Q4": 0, "Unranked": 2}


def test_chart_svg_and_export_csv(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    analyze = client.post(f"/projects/{pid}/analyze", headers=headers,
                          json={"module": "bibtrail", "operation": "publications_series",
                                "params": {"mode": "total"}}).json()
    chart = client.post(f"/projects/{pid}/chart", headers=headers,
                        json={"result_id": analyze["result_id"],
                              "options": {"chart_type": "bar"}})
    assert chart.status_code == 200, chart.text
    spec_id = chart.json()["spec_id"]
    svg = client.get(f"/projects/{pid}/chart/{spec_id}.svg",
                     params={"bg": "transparent"}, headers=headers)
    assert svg.status_code == 200
    assert svg.headers["content-type"].startswith("image/svg+xml")
    assert svg.content.startswith(b"<?xml")
    assert b'fill="#ffffff"' not in svg.content

    csv_resp = client.get(f"/projects/{pid}/export/{analyze['result_id']}.csv",
                          headers=headers)
    assert csv_resp.status_code == 200
    assert csv_resp.content.startswith(b"year,total\r\n2019,1\r\n")


def test_summary_endpoint_fallback(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    analyze = client.post(f"/projects/{pid}/analyze", headers=headers,
                          json={"module": "bibtrail", "operation": "publications_series",
                                "params": {"mode": "total"}}).json()
    resp = client.post(f"/projects/{pid}/summary", headers=headers,
                       json={"result_id": analyze["result_id"]})
    body = resp.json()
    assert body["provider"] == "template-fallback"
    assert body["text"]


def test_unknown_result_404(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    assert client.get(f"/projects/{pid}/export/deadbeef.csv",
                      headers=headers).status_code == 404
    assert client.get(f"/projects/{pid}/chart/deadbeef.svg",
                      headers=headers).status_code == 404


def test_graph_analysis_over_http(client, t5_csv):
    headers = login(client)
    pid = make_project(client, headers, t5_csv)
    resp = client.post(f"/projects/{pid}/analyze", headers=headers,
                       json={"module": "colabrix", "operation": "build_graph",
                             "params": {"level": "author"}})
    body = resp.json()["result"]
    assert body["type"] == "graph"
    assert {"source": "Bose K.", "target": "Rao A.", "weight": 2} in body["links"]
    csv_resp = client.get(f"/projects/{pid}/export/{resp.json()['result_id']}.csv",
                          headers=headers)
    assert csv_resp.content.startswith(b"source,target,weight\r\n")


def test_persistence_across_restart(tmp_path, t5_csv):
    data_dir = tmp_path / "data"
    with TestClient(create_app(data_dir=data_dir)) as client:
        headers = login(client)
        pid = make_project(client, headers, t5_csv)
        analyze = client.post(f"/projects/{pid}/analyze", headers=headers,
                              json={"module": "bibtrail",
                                    "operation": "publications_series",
                                    "params": {"mode": "total"}}).json()
        preview_before = client.get(f"/projects/{pid}/preview", headers=headers).json()

    # new app instance over the same directory: same token, projects, results
    with TestClient(create_app(data_dir=data_dir)) as client2:
        resp = client2.get(f"/projects/{pid}/preview", headers=headers)
        assert resp.status_code == 200
        assert resp.json() == preview_before
        again = client2.post(f"/projects/{pid}/analyze", headers=headers,
                             json={"module": "bibtrail",
                                   "operation": "publications_series",
                                   "params": {"mode": "total"}}).json()
        assert again == analyze
        csv_resp = client2.get(
            f"/projects/{pid}/export/{analyze['result_id']}.csv", headers=headers)
        assert csv_resp.status_code == 200
