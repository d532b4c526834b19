"""Local HTTP service exposing model storage and the analysis workflow.

The service is a thin shell: every response body for an analysis route is
produced by the same builders the CLI uses (see report.py), so identical
queries against identical models return byte-identical JSON. Models live
as plain ``.cdag`` files in one directory; a SHA-256 hash of the stored
source doubles as an optimistic-concurrency token.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from . import derivation, dsl, implications as impl_mod, report
from .errors import CausalSpecError, CycleError, ParseError
from .graph import Dag, d_separated

_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class DsepQuery(BaseModel):
    x: str
    y: str
    given: list[str] = Field(default_factory=list)


class ImplicationsQuery(BaseModel):
    scope: list[str] | None = None
    max_given: int | None = None


class RequirementsQuery(BaseModel):
    exposure: str | None = None
    outcome: str | None = None


class AnalyzeQuery(BaseModel):
    max_given: int | None = None


def _hash(source: str) -> str:
    return hashlib.sha256(source.encode("utf-8")).hexdigest()


def _error(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse({"error": message, **extra}, status_code=status)


def _canonical(obj, headers: dict[str, str] | None = None) -> Response:
    return Response(
        content=report.canonical_json(obj),
        media_type="application/json",
        headers=headers or {},
    )


class ModelStore:
    """Filesystem-backed model collection, one ``.cdag`` file per model."""

    def __init__(self, root: Path):
        self.root = root
        self.lock = threading.Lock()

    def path(self, name: str) -> Path:
        return self.root / f"{name}.cdag"

    def names(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.cdag") if _NAME_RE.match(p.stem))

    def read(self, name: str) -> str | None:
        p = self.path(name)
        if not p.exists():
            return None
        return p.read_text(encoding="utf-8")

    def write(self, name: str, source: str) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.path(name).write_text(source, encoding="utf-8")


def create_app(model_dir: Path) -> FastAPI:
    store = ModelStore(Path(model_dir))
    app = FastAPI(title="causal-spec service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["ETag", "X-Model-Hash"],
    )

    def _load(name: str):
        """Return (doc, dag, source, hash) or an error response."""
        if not _NAME_RE.match(name):
            return _error(404, f"unknown model: {name}")
        source = store.read(name)
        if source is None:
            return _error(404, f"unknown model: {name}")
        try:
            doc = dsl.load(source)
            dag = Dag.from_document(doc)
        except ParseError as exc:
            return _error(400, str(exc), line=exc.line, column=exc.column)
        except CycleError as exc:
            return _error(400, str(exc), witness=list(exc.witness))
        except CausalSpecError as exc:
            return _error(400, str(exc))
        return doc, dag, source, _hash(source)

    @app.get("/models")
    def list_models():
        entries = []
        for name in store.names():
            source = store.read(name)
            entries.append({"name": name, "hash": _hash(source or "")})
        return _canonical({"models": entries})

    @app.get("/models/{name}")
    def get_model(name: str):
        loaded = _load(name)
        if isinstance(loaded, Response):
            return loaded
        doc, _, source, digest = loaded
        obj = {
            "name": name,
            "hash": digest,
            "source": source,
            "document": json.loads(dsl.to_json(doc)),
        }
        return _canonical(obj, {"ETag": digest})

    @app.put("/models/{name}")
    async def put_model(name: str, request: Request):
        if not _NAME_RE.match(name):
            return _error(400, "model names may contain only letters, digits, '_' and '-'")
        body = (await request.body()).decode("utf-8")
        content_type = request.headers.get("content-type", "")
        try:
            if "json" in content_type:
                doc = dsl.parse_json(body)
                source = dsl.to_dsl(doc)
            else:
                doc = dsl.parse(body)
                source = body
            Dag.from_document(doc)
        except ParseError as exc:
            return _error(400, str(exc), line=exc.line, column=exc.column)
        except CycleError as exc:
            return _error(400, str(exc), witness=list(exc.witness))
        except (CausalSpecError, ValueError) as exc:
            return _error(400, str(exc))
        expected = request.headers.get("if-match")
        with store.lock:
            current = store.read(name)
            if expected is not None:
                current_hash = _hash(current) if current is not None else None
                if expected.strip('"') != current_hash:
                    return _error(
                        409,
                        "stale model hash",
                        current_hash=current_hash,
                    )
            created = current is None
            store.write(name, source)
        digest = _hash(source)
        return _canonical(
            {"name": name, "hash": digest, "created": created},
            {"ETag": digest},
        )

    @app.post("/models/{name}/analyze")
    def analyze_model(name: str, query: AnalyzeQuery | None = None):
        loaded = _load(name)
        if isinstance(loaded, Response):
            return loaded
        doc, _, _, digest = loaded
        max_given = query.max_given if query else None
        obj = report.analysis_report(doc, max_given)
        return _canonical(obj, {"X-Model-Hash": digest})

    @app.post("/models/{name}/dsep")
    def dsep_model(name: str, query: DsepQuery):
        loaded = _load(name)
        if isinstance(loaded, Response):
            return loaded
        _, dag, _, digest = loaded
        try:
            sep = d_separated(dag, query.x, query.y, query.given)
        except (CausalSpecError, ValueError) as exc:
            return _error(400, str(exc))
        obj = {
            "x": query.x,
            "y": query.y,
            "given": sorted(query.given),
            "separated": sep,
        }
        return _canonical(obj, {"X-Model-Hash": digest})

    @app.post("/models/{name}/implications")
    def implications_model(name: str, query: ImplicationsQuery | None = None):
        loaded = _load(name)
        if isinstance(loaded, Response):
            return loaded
        _, dag, _, digest = loaded
        scope = (query.scope if query else None) or report.runtime_scope(dag)
        max_given = query.max_given if query else None
        try:
            stmts = impl_mod.implied_independencies(dag, scope, max_given)
        except (CausalSpecError, ValueError) as exc:
            return _error(400, str(exc))
        return _canonical([report.ci_obj(s) for s in stmts], {"X-Model-Hash": digest})

    @app.post("/models/{name}/requirements")
    def requirements_model(name: str, query: RequirementsQuery | None = None):
        loaded = _load(name)
        if isinstance(loaded, Response):
            return loaded
        doc, dag, _, digest = loaded
        exposure = query.exposure if query else None
        outcome = query.outcome if query else None
        try:
            artifacts = derivation.derive_requirements(dag, doc, exposure, outcome)
            tests = derivation.derive_test_cases(dag, exposure, outcome, doc)
            monitors = derivation.derive_monitors(dag)
        except CausalSpecError as exc:
            return _error(400, str(exc))
        obj = {
            "requirements": [report.artifact_obj(a) for a in artifacts],
            "test_cases": [report.artifact_obj(a) for a in tests],
            "monitors": [report.monitor_obj(m, f"MON-{i + 1}") for i, m in enumerate(monitors)],
        }
        return _canonical(obj, {"X-Model-Hash": digest})

    @app.get("/models/{name}/export")
    def export_model(name: str, format: str = Query(default="dot")):
        if format not in ("dot", "json"):
            return _error(400, f"unsupported export format: {format}")
        loaded = _load(name)
        if isinstance(loaded, Response):
            return loaded
        doc, _, _, digest = loaded
        if format == "dot":
            return PlainTextResponse(
                report.to_dot(doc),
                media_type="text/vnd.graphviz",
                headers={"X-Model-Hash": digest},
            )
        return Response(
            content=dsl.to_json(doc),
            media_type="application/json",
            headers={"X-Model-Hash": digest},
        )

    return app
