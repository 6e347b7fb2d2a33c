"""HTTP JSON API over the full workflow: login, multi-file upload, mapping,
build, filtering, analysis, charts, CSV export, summaries.

Projects persist in one directory per project (raw uploads, canonical
corpus CSV, dedup report, cached results and chart specs as JSON), so a
service restart reloads everything. Login issues an HMAC-signed token for
the given email; project isolation is by token owner. Configuration comes
from create_app arguments or environment variables:

    SCHOLARMETRICS_DATA_DIR      project store location
    SCHOLARMETRICS_SUMMARY_URL   optional text-generation endpoint
    SCHOLARMETRICS_GENDER_URL    optional gender-prediction endpoint
"""

import base64
import hashlib
import hmac
import json
import os
import secrets
import threading
import time
import uuid
from pathlib import Path

from fastapi import Depends, FastAPI, File, Form, Header, Request, UploadFile
from fastapi.responses import JSONResponse, Response

from . import bibtrail, ingest, ops, scitrace, summarize, viz
from .result import AnalysisResult
from .corpus import Corpus, FilterSpec, filter_corpus, summarize_corpus
from .errors import ScholarmetricsError

DEFAULT_PORT = 8600


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message
        super().__init__(message)


class ProjectStore:
    """File-backed store: one directory per project, JSON metadata, corpus
    CSV, cached results. Reads go through small in-memory caches keyed by
    file mtime; builds are serialized per project."""

    def __init__(self, data_dir):
        self.root = Path(data_dir)
        self.projects_dir = self.root / "projects"
        self.projects_dir.mkdir(parents=True, exist_ok=True)
        self._secret_path = self.root / "secret.key"
        if not self._secret_path.exists():
            self._secret_path.write_bytes(secrets.token_bytes(32))
        self.secret = self._secret_path.read_bytes()
        self._locks = {}
        self._locks_guard = threading.Lock()
        self._corpus_cache = {}

    # -- tokens ------------------------------------------------------------
    def make_token(self, email: str) -> str:
        payload = f"{email}|{uuid.uuid4().hex}".encode()
        sig = hmac.new(self.secret, payload, hashlib.sha256).digest()
        return (base64.urlsafe_b64encode(payload).decode() + "."
                + base64.urlsafe_b64encode(sig).decode())

    def verify_token(self, token: str) -> str | None:
        try:
            encoded_payload, _, encoded_sig = token.partition(".")
            payload = base64.urlsafe_b64decode(encoded_payload.encode())
            sig = base64.urlsafe_b64decode(encoded_sig.encode())
            expected = hmac.new(self.secret, payload, hashlib.sha256).digest()
            if not hmac.compare_digest(sig, expected):
                return None
            return payload.decode().split("|", 1)[0]
        except Exception:
            return None

    # -- project lifecycle ---------------------------------------------------
    def lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    def project_dir(self, project_id: str) -> Path:
        return self.projects_dir / project_id

    def create_project(self, owner: str) -> str:
        project_id = uuid.uuid4().hex[:12]
        pdir = self.project_dir(project_id)
        (pdir / "files").mkdir(parents=True)
        (pdir / "results").mkdir()
        (pdir / "charts").mkdir()
        now = time.time()
        self._write_meta(project_id, {
            "project_id": project_id,
            "owner": owner,
            "created_at": now,
            "updated_at": now,
            "files": [],
            "mapping_override": None,
            "file_mappings": {},
            "filters": None,
        })
        return project_id

    def _write_meta(self, project_id: str, meta: dict):
        path = self.project_dir(project_id) / "meta.json"
        path.write_text(json.dumps(meta, indent=1, sort_keys=True), "utf-8")

    def meta(self, project_id: str) -> dict:
        path = self.project_dir(project_id) / "meta.json"
        if not path.exists():
            raise ApiError(404, f"unknown project {project_id}")
        return json.loads(path.read_text("utf-8"))

    def update_meta(self, project_id: str, **changes) -> dict:
        meta = self.meta(project_id)
        meta.update(changes)
        meta["updated_at"] = time.time()
        self._write_meta(project_id, meta)
        return meta

    def owned(self, project_id: str, email: str) -> dict:
        meta = self.meta(project_id)
        if meta["owner"] != email:
            raise ApiError(404, f"unknown project {project_id}")
        return meta

    def list_projects(self, email: str) -> list:
        out = []
        for pdir in sorted(self.projects_dir.iterdir()):
            meta_path = pdir / "meta.json"
            if meta_path.exists():
                meta = json.loads(meta_path.read_text("utf-8"))
                if meta["owner"] == email:
                    out.append({"project_id": meta["project_id"],
                                "created_at": meta["created_at"],
                                "updated_at": meta["updated_at"],
                                "n_files": len(meta["files"]),
                                "built": (pdir / "corpus.csv").exists()})
        return out

    # -- files + corpus ------------------------------------------------------
    def add_file(self, project_id: str, filename: str, kind: str, content: bytes) -> dict:
        meta = self.meta(project_id)
        if kind == "scimago":
            index = bibtrail.load_scimago(content)
            (self.project_dir(project_id) / "scimago.csv").write_bytes(content)
            self.update_meta(project_id)
            return {"source_label": filename, "kind": "scimago",
                    "n_journals": len(index.entries)}
        table = ingest.parse_delimited(content, kind, source_label=filename)
        mapping = ingest.infer_field_mapping(table)
        stored = f"{len(meta['files']):03d}_{Path(filename).name}"
        (self.project_dir(project_id) / "files" / stored).write_bytes(content)
        meta["files"].append({"label": filename, "kind": kind, "stored": stored})
        meta["file_mappings"][filename] = mapping.to_dict()
        self._write_meta(project_id, meta)
        return {
            "source_label": filename,
            "kind": kind,
            "n_rows": len(table.rows),
            "headers": list(table.headers),
            "inferred_mapping": mapping.to_dict(),
        }

    def table_for(self, project_id: str, file_entry: dict) -> ingest.RawTable:
        content = (self.project_dir(project_id) / "files" / file_entry["stored"]).read_bytes()
        return ingest.parse_delimited(content, file_entry["kind"],
                                      source_label=file_entry["label"])

    def quartile_index(self, project_id: str):
        path = self.project_dir(project_id) / "scimago.csv"
        if not path.exists():
            return None
        return bibtrail.load_scimago(path.read_bytes())

    def set_mapping(self, project_id: str, mapping: ingest.FieldMapping,
                    source_label: str | None) -> dict:
        meta = self.meta(project_id)
        targets = [f for f in meta["files"]
                   if source_label is None or f["label"] == source_label]
        if source_label is not None and not targets:
            raise ApiError(404, f"no uploaded file labelled {source_label!r}")
        for entry in targets:                      # re-validate against each table
            ingest.apply_mapping(self.table_for(project_id, entry), mapping)
        if source_label is None:
            meta["mapping_override"] = mapping.to_dict()
        else:
            meta["file_mappings"][source_label] = mapping.to_dict()
        self._write_meta(project_id, meta)
        return mapping.to_dict()

    def build(self, project_id: str) -> dict:
        with self.lock(project_id):
            meta = self.meta(project_id)
            if not meta["files"]:
                raise ApiError(409, "no files uploaded; nothing to build")
            record_lists = []
            for entry in meta["files"]:
                table = self.table_for(project_id, entry)
                if meta["mapping_override"]:
                    mapping = ingest.FieldMapping.from_dict(meta["mapping_override"])
                else:
                    mapping = ingest.FieldMapping.from_dict(
                        meta["file_mappings"].get(entry["label"]) or
                        ingest.infer_field_mapping(table).to_dict())
                record_lists.append(ingest.apply_mapping(table, mapping))
            corpus, report = ingest.merge_and_dedup(record_lists)
            pdir = self.project_dir(project_id)
            (pdir / "corpus.csv").write_bytes(ingest.corpus_to_csv(corpus))
            (pdir / "dedup.json").write_text(
                json.dumps(report.to_dict(), indent=1, sort_keys=True), "utf-8")
            self._corpus_cache.pop(project_id, None)
            self.update_meta(project_id)
            return {"dedup_report": report.to_dict(),
                    "stats": summarize_corpus(corpus).to_dict()}

    def corpus(self, project_id: str) -> Corpus:
        path = self.project_dir(project_id) / "corpus.csv"
        if not path.exists():
            raise ApiError(409, "project has no built corpus; POST build first")
        mtime = path.stat().st_mtime_ns
        cached = self._corpus_cache.get(project_id)
        if cached and cached[0] == mtime:
            return cached[1]
        corpus = ingest.corpus_from_csv(path.read_bytes())
        self._corpus_cache[project_id] = (mtime, corpus)
        return corpus

    def corpus_version(self, project_id: str) -> str:
        path = self.project_dir(project_id) / "corpus.csv"
        if not path.exists():
            raise ApiError(409, "project has no built corpus; POST build first")
        return hashlib.sha256(path.read_bytes()).hexdigest()[:16]

    def filters(self, project_id: str) -> FilterSpec:
        raw = self.meta(project_id).get("filters")
        return FilterSpec.from_dict(raw) if raw else FilterSpec()

    def filtered_corpus(self, project_id: str) -> Corpus:
        return filter_corpus(self.corpus(project_id), self.filters(project_id))

    # -- results + charts ------------------------------------------------------
    def result_id(self, project_id: str, module: str, operation: str, params: dict) -> str:
        key = ops.canonical_json({
            "corpus": self.corpus_version(project_id),
            "filters": self.filters(project_id).to_dict(),
            "module": module,
            "operation": operation,
            "params": params,
        })
        return hashlib.sha256(key).hexdigest()[:16]

    def save_result(self, project_id: str, result_id: str, payload: dict):
        path = self.project_dir(project_id) / "results" / f"{result_id}.json"
        path.write_bytes(ops.canonical_json(payload))

    def load_result(self, project_id: str, result_id: str) -> dict:
        path = self.project_dir(project_id) / "results" / f"{result_id}.json"
        if not path.exists():
            raise ApiError(404, f"unknown result {result_id}")
        return json.loads(path.read_bytes())

    def save_chart(self, project_id: str, spec: viz.ChartSpec) -> str:
        payload = ops.canonical_json(spec.to_json_dict())
        spec_id = hashlib.sha256(payload).hexdigest()[:16]
        (self.project_dir(project_id) / "charts" / f"{spec_id}.json").write_bytes(payload)
        return spec_id

    def load_chart(self, project_id: str, spec_id: str) -> viz.ChartSpec:
        path = self.project_dir(project_id) / "charts" / f"{spec_id}.json"
        if not path.exists():
            raise ApiError(404, f"unknown chart spec {spec_id}")
        return viz.ChartSpec.from_json_dict(json.loads(path.read_bytes()))


def create_app(data_dir=None, summary_provider=None, gender_provider=None) -> FastAPI:
    data_dir = data_dir or os.environ.get("SCHOLARMETRICS_DATA_DIR", "./scholarmetrics-data")
    store = ProjectStore(data_dir)

    if summary_provider is None and os.environ.get("SCHOLARMETRICS_SUMMARY_URL"):
        summary_provider = summarize.HttpSummaryProvider(
            os.environ["SCHOLARMETRICS_SUMMARY_URL"])
    if gender_provider is None and os.environ.get("SCHOLARMETRICS_GENDER_URL"):
        gender_provider = scitrace.HttpGenderProvider(
            os.environ["SCHOLARMETRICS_GENDER_URL"])

    app = FastAPI(title="scholarmetrics", version="0.1.0")
    app.state.store = store

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    @app.exception_handler(ScholarmetricsError)
    async def handle_data_error(request: Request, exc: ScholarmetricsError):
        return JSONResponse(status_code=422, content={
            "error": type(exc).__name__, "detail": str(exc)})

    def current_email(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise ApiError(401, "missing bearer token")
        email = store.verify_token(authorization.removeprefix("Bearer "))
        if not email:
            raise ApiError(401, "invalid token")
        return email

    @app.post("/auth/login")
    async def login(body: dict):
        email = str(body.get("email", "")).strip()
        if "@" not in email or len(email) < 3:
            raise ApiError(422, "a valid email is required")
        return {"token": store.make_token(email), "email": email}

    @app.post("/projects")
    async def create_project(email: str = Depends(current_email)):
        return {"project_id": store.create_project(email)}

    @app.get("/projects")
    async def list_projects(email: str = Depends(current_email)):
        return {"projects": store.list_projects(email)}

    @app.post("/projects/{project_id}/files")
    async def upload_files(project_id: str,
                           files: list[UploadFile] = File(...),
                           kind: str = Form(default="scopus"),
                           email: str = Depends(current_email)):
        store.owned(project_id, email)
        if kind not in ingest.SOURCE_KINDS + ("scimago",):
            raise ApiError(422, f"kind must be one of {ingest.SOURCE_KINDS + ('scimago',)}")
        out = []
        for f in files:
            content = await f.read()
            out.append(store.add_file(project_id, f.filename, kind, content))
        return {"files": out}

    @app.put("/projects/{project_id}/mapping")
    async def put_mapping(project_id: str, body: dict,
                          email: str = Depends(current_email)):
        store.owned(project_id, email)
        source_label = body.pop("source_label", None)
        mapping = ingest.FieldMapping.from_dict(body)
        return {"mapping": store.set_mapping(project_id, mapping, source_label),
                "source_label": source_label}

    @app.post("/projects/{project_id}/build")
    async def build(project_id: str, email: str = Depends(current_email)):
        store.owned(project_id, email)
        return store.build(project_id)

    @app.get("/projects/{project_id}/preview")
    async def preview(project_id: str, n: int = 10,
                      email: str = Depends(current_email)):
        store.owned(project_id, email)
        corpus = store.corpus(project_id)
        return {"records": [r.to_dict() for r in corpus.records[:max(n, 0)]],
                "total": len(corpus)}

    @app.put("/projects/{project_id}/filters")
    async def put_filters(project_id: str, body: dict,
                          email: str = Depends(current_email)):
        store.owned(project_id, email)
        spec = FilterSpec.from_dict(body)
        store.update_meta(project_id, filters=spec.to_dict())
        stats = summarize_corpus(store.filtered_corpus(project_id))
        return {"filters": spec.to_dict(), "stats": stats.to_dict()}

    @app.post("/projects/{project_id}/analyze")
    async def analyze(project_id: str, body: dict,
                      email: str = Depends(current_email)):
        store.owned(project_id, email)
        module = body.get("module", "")
        operation = body.get("operation", "")
        params = dict(body.get("params") or {})
        result_id = store.result_id(project_id, module, operation, params)
        path = store.project_dir(project_id) / "results" / f"{result_id}.json"
        if path.exists():
            payload = json.loads(path.read_bytes())
        else:
            corpus = store.filtered_corpus(project_id)
            context = {
                "quartile_index": store.quartile_index(project_id),
                "gender_provider": gender_provider,
            }
            value = ops.run_operation(module, operation, corpus, params, context)
            payload = {
                "module": module,
                "operation": operation,
                "params": params,
                "result": ops.to_json_obj(value),
            }
            store.save_result(project_id, result_id, payload)
        return {"result_id": result_id, **payload}

    def _resolve_result(project_id: str, body: dict) -> dict:
        if body.get("result_id"):
            return store.load_result(project_id, body["result_id"])["result"]
        if body.get("result"):
            return body["result"]
        raise ApiError(422, "provide result_id or an inline result")

    @app.post("/projects/{project_id}/chart")
    async def chart(project_id: str, body: dict,
                    email: str = Depends(current_email)):
        store.owned(project_id, email)
        result_obj = _resolve_result(project_id, body)
        if result_obj.get("type") != "table":
            raise ApiError(422, "charts are built from table results; "
                                "graphs already carry their own JSON form")
        result = AnalysisResult.from_dict(result_obj)
        options = viz.ChartOptions.from_dict(body.get("options") or {})
        spec = viz.build_chart_spec(result, options)
        spec_id = store.save_chart(project_id, spec)
        return {"spec_id": spec_id, "spec": spec.to_json_dict()}

    @app.get("/projects/{project_id}/chart/{spec_id}.svg")
    async def chart_svg(project_id: str, spec_id: str, bg: str = "white",
                        email: str = Depends(current_email)):
        store.owned(project_id, email)
        spec = store.load_chart(project_id, spec_id)
        svg = viz.render_svg(spec, background=bg)
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/projects/{project_id}/export/{result_id}.csv")
    async def export_result(project_id: str, result_id: str,
                            email: str = Depends(current_email)):
        store.owned(project_id, email)
        payload = store.load_result(project_id, result_id)
        data = ops.to_csv_bytes(payload["result"])
        return Response(content=data, media_type="text/csv",
                        headers={"Content-Disposition":
                                 f'attachment; filename="{result_id}.csv"'})

    @app.post("/projects/{project_id}/summary")
    async def summary(project_id: str, body: dict,
                      email: str = Depends(current_email)):
        store.owned(project_id, email)
        result_obj = _resolve_result(project_id, body)
        if result_obj.get("type") != "table":
            raise ApiError(422, "summaries cover table results")
        result = AnalysisResult.from_dict(result_obj)
        outcome = summarize.generate_summary(result, provider=summary_provider)
        return {"text": outcome.text, "provider": outcome.provider,
                "fallback_used": outcome.fallback_used}

    return app


def run(host: str = "127.0.0.1", port: int | None = None, data_dir=None):
    import uvicorn

    port = port or int(os.environ.get("SCHOLARMETRICS_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(data_dir=data_dir), host=host, port=port)
