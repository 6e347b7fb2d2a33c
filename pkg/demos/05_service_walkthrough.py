"""End-to-end HTTP workflow against the JSON API: login, upload, mapping,
build, filter, analyze, chart, export, summary.

Uses an in-process test client so the script is self-contained; point an
httpx.Client at `scholarmetrics serve` for the same calls over the network.

Run from the repository root:  python demos/05_service_walkthrough.py
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient
from sample_data import SCIMAGO_SAMPLE, sample_export

from scholarmetrics.service import create_app

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

workdir = tempfile.mkdtemp(prefix="scholarmetrics-demo-")
client = TestClient(create_app(data_dir=workdir))

# 1. Email login issues a signed bearer token.
token = client.post("/auth/login", json={"email": "demo@example.org"}).json()["token"]
auth = {"Authorization": f"Bearer {token}"}

# 2. Create a project and upload files (multipart). A Scimago rank file
#    uploads with kind=scimago and enables the quartile analyses.
pid = client.post("/projects", headers=auth).json()["project_id"]
up = client.post(f"/projects/{pid}/files", headers=auth,
                 files=[("files", ("demo.csv", sample_export(), "text/csv"))],
                 data={"kind": "scopus"}).json()["files"][0]
print(f"uploaded {up['source_label']}: {up['n_rows']} rows")
print("inferred title column:", up["inferred_mapping"]["assignments"]["title"])
client.post(f"/projects/{pid}/files", headers=auth,
            files=[("files", ("scimago.csv", SCIMAGO_SAMPLE, "text/csv"))],
            data={"kind": "scimago"})

# 3. Build merges + dedups into the project corpus.
build = client.post(f"/projects/{pid}/build", headers=auth).json()
print(f"built corpus: {build['stats']['n_records']} records "
      f"({len(build['dedup_report']['duplicate_groups'])} duplicate groups)")

# 4. Ten-row preview and a year filter.
preview = client.get(f"/projects/{pid}/preview", params={"n": 10}, headers=auth).json()
print(f"preview shows {len(preview['records'])} of {preview['total']} records")
filt = client.put(f"/projects/{pid}/filters", headers=auth,
                  json={"year_range": [2016, 2024]}).json()
print(f"after filter: {filt['stats']['n_records']} records")

# 5. Run analyses; results are cached by content hash.
analyze = client.post(f"/projects/{pid}/analyze", headers=auth,
                      json={"module": "bibtrail",
                            "operation": "publications_series",
                            "params": {"mode": "total"}}).json()
print("publication rows:", analyze["result"]["rows"][:4], "...")

quartiles = client.post(f"/projects/{pid}/analyze", headers=auth,
                        json={"module": "bibtrail",
                              "operation": "journal_analysis",
                              "params": {"mode": "quartile_counts"}}).json()
print("quartiles:", quartiles["result"]["rows"])

# 6. Chart spec + SVG download with a transparent background.
chart = client.post(f"/projects/{pid}/chart", headers=auth,
                    json={"result_id": analyze["result_id"],
                          "options": {"chart_type": "line", "year_gap": 2}}).json()
svg = client.get(f"/projects/{pid}/chart/{chart['spec_id']}.svg",
                 params={"bg": "transparent"}, headers=auth)
(OUT / "service_chart.svg").write_bytes(svg.content)

# 7. CSV export and the AI-style summary (template fallback offline).
csv_resp = client.get(f"/projects/{pid}/export/{analyze['result_id']}.csv", headers=auth)
(OUT / "service_result.csv").write_bytes(csv_resp.content)
summary = client.post(f"/projects/{pid}/summary", headers=auth,
                      json={"result_id": analyze["result_id"]}).json()
print(f"\nsummary [{summary['provider']}]:\n  {summary['text']}")
print(f"\nartifacts in {OUT}/, project data in {workdir}")
