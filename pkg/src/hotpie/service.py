"""HTTP JSON API over a directory of project files.

Concurrency contract: optimistic versioning. Every project carries an
in-memory version counter; mutations must send ``If-Match: <version>`` and a
stale version is answered with 409 plus the current version, so a second
scribe's edit surfaces loudly instead of merging silently. Writes to one
project are serialized behind a lock; the accepted order IS the version
order, and replaying the accepted mutations through the library reproduces
the stored state. Reads are lock-free against atomically-replaced files.

Status mapping: 400 malformed/unparseable input (carrying the core error
name), 404 unknown project, path or object reference, 409 version conflict,
422 domain-rule violations (SelfLoop, PhaseRegression, ...).
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse

from . import analysis, reports, stpa, storage, taxonomy
from .errors import (
    DuplicateId,
    HotpieError,
    MalformedCatalog,
    MalformedProfiles,
    MalformedStructure,
    SchemaMismatch,
    UnknownFactor,
    UnknownObject,
    UnknownPath,
)
from .model import Abstraction, CausalEndpoint, Classification, LifecyclePhase, Project
from .taxonomy import FACTOR_ORDER, PrimaryFactor


class ApiError(Exception):
    def __init__(self, status: int, name: str, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.body = {"error": name, "message": message, **extra}


_STATUS_400 = (MalformedCatalog, MalformedProfiles, MalformedStructure, UnknownFactor, SchemaMismatch)
_STATUS_404 = (UnknownObject, UnknownPath)


def _api_error(exc: HotpieError) -> ApiError:
    if isinstance(exc, _STATUS_404):
        return ApiError(404, exc.code, str(exc))
    if isinstance(exc, _STATUS_400):
        return ApiError(400, exc.code, str(exc))
    return ApiError(422, exc.code, str(exc))


class ProjectStore:
    """Versioned project files under one root directory.

    The version counter lives in memory and increments by exactly one per
    accepted mutation; files on disk are always full, valid project
    documents (written atomically).
    """

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._versions: dict[str, int] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._index_lock = threading.Lock()
        for path in sorted(self.root.glob("*.json")):
            self._versions[path.stem] = 0
            self._locks[path.stem] = threading.Lock()

    def _path(self, project_id: str) -> Path:
        if "/" in project_id or project_id in ("", ".", ".."):
            raise ApiError(400, "BadProjectId", f"bad project id {project_id!r}")
        return self.root / f"{project_id}.json"

    def ids(self) -> list[str]:
        with self._index_lock:
            return sorted(self._versions)

    def version(self, project_id: str) -> int:
        with self._index_lock:
            if project_id not in self._versions:
                raise ApiError(404, "UnknownProject", f"no project {project_id!r}")
            return self._versions[project_id]

    def load(self, project_id: str) -> tuple[Project, int]:
        version = self.version(project_id)
        project = storage.load_project_file(self._path(project_id))
        return project, version

    def _write(self, project: Project) -> None:
        path = self._path(project.id)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(storage.save_project(project))
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def create(self, project: Project) -> int:
        with self._index_lock:
            if project.id in self._versions or self._path(project.id).exists():
                raise DuplicateId(f"project {project.id!r} already exists")
            self._versions[project.id] = 0
            self._locks[project.id] = threading.Lock()
        self._write(project)
        return 0

    def mutate(self, project_id: str, if_match: Optional[str], fn) -> tuple[dict, int]:
        """Apply ``fn(project)`` under the version check; returns (result, new version)."""
        if if_match is None:
            raise ApiError(400, "MissingIfMatch", "mutations require an If-Match: <version> header")
        try:
            expected = int(if_match.strip().strip('"'))
        except ValueError:
            raise ApiError(400, "BadIfMatch", f"If-Match must be an integer, got {if_match!r}") from None
        with self._index_lock:
            if project_id not in self._versions:
                raise ApiError(404, "UnknownProject", f"no project {project_id!r}")
            lock = self._locks[project_id]
        with lock:
            current = self._versions[project_id]
            if expected != current:
                raise ApiError(
                    409, "VersionConflict",
                    f"version {expected} is stale; current is {current}",
                    version=current,
                )
            project = storage.load_project_file(self._path(project_id))
            result = fn(project)
            self._write(project)
            self._versions[project_id] = current + 1
            return result, current + 1


# --- request parsing helpers --------------------------------------------------


def _require(doc: dict, field: str) -> object:
    if field not in doc or doc[field] is None:
        raise ApiError(400, "MissingField", f"request is missing {field!r}")
    return doc[field]


def _enum(enum_cls, raw, what: str):
    try:
        return enum_cls(raw)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise ApiError(400, "BadValue", f"bad {what} {raw!r}; expected one of {valid}") from None


def _endpoint(doc: object, which: str) -> CausalEndpoint:
    if not isinstance(doc, dict):
        raise ApiError(400, "BadValue", f"{which} endpoint must be an object")
    return CausalEndpoint(
        object=str(_require(doc, "object")),
        primary=_enum(PrimaryFactor, _require(doc, "primary"), f"{which} primary factor"),
        secondary=doc.get("secondary"),
    )


def _opt_phase(doc: dict, field: str = "phase") -> Optional[LifecyclePhase]:
    raw = doc.get(field)
    return None if raw is None else _enum(LifecyclePhase, raw, field)


async def _json_body(request: Request) -> dict:
    try:
        doc = json.loads(await request.body() or b"{}")
    except json.JSONDecodeError as exc:
        raise ApiError(400, "MalformedBody", f"request body is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ApiError(400, "MalformedBody", "request body must be a JSON object")
    return doc


def _prompt_doc(p: analysis.SuggestionPrompt) -> dict:
    return {
        "source_object": p.source_object,
        "target_object": p.target_object,
        "source_factor": p.source_factor.value,
        "target_factor": p.target_factor.value,
        "covered": p.covered,
        "templates": list(p.templates),
    }


def create_app(
    store_root: Path,
    catalog_path: Optional[Path] = None,
    profiles_path: Optional[Path] = None,
    cors_origins: Optional[list[str]] = None,
) -> FastAPI:
    """Build the API over ``store_root`` (a directory of project files)."""
    store = ProjectStore(Path(store_root))
    catalog = (
        taxonomy.load_catalog(catalog_path) if catalog_path else taxonomy.load_default_catalog()
    )
    all_profiles = (
        analysis.load_profiles(profiles_path) if profiles_path else analysis.load_default_profiles()
    )

    app = FastAPI(title="hotpie", version="0.1.0")

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _handle_api_error(_request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body)

    @app.exception_handler(HotpieError)
    async def _handle_domain_error(_request, exc: HotpieError):
        mapped = _api_error(exc)
        return JSONResponse(status_code=mapped.status, content=mapped.body)

    @app.exception_handler(RequestValidationError)
    async def _handle_request_validation(_request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "MalformedRequest", "message": str(exc.errors()[:3])},
        )

    def _versioned(payload: dict, version: int, status: int = 200) -> JSONResponse:
        payload = {**payload, "version": version}
        return JSONResponse(status_code=status, content=payload, headers={"ETag": str(version)})

    def _profiles_subset(views: Optional[str]) -> list[analysis.ViewProfile]:
        if not views:
            return list(all_profiles)
        return analysis.select_views(all_profiles, [v.strip() for v in views.split(",")])

    # --- projects -------------------------------------------------------

    @app.get("/projects")
    def list_projects():
        out = []
        for pid in store.ids():
            project, version = store.load(pid)
            out.append(
                {
                    "id": pid,
                    "name": project.name,
                    "current_phase": project.current_phase.value,
                    "objects": len(project.objects),
                    "paths": len(project.paths),
                    "version": version,
                }
            )
        return out

    @app.post("/projects", status_code=201)
    async def create_project(request: Request):
        doc = await _json_body(request)
        if doc.get("example"):
            project = storage.load_example_project()
            if doc.get("id"):
                project.id = str(doc["id"])
        else:
            project = Project.create(
                str(_require(doc, "name")),
                doc.get("id"),
                actor=str(doc.get("author", "unknown")),
            )
        version = store.create(project)
        return _versioned({"id": project.id}, version, status=201)

    @app.get("/projects/{pid}")
    def get_project(pid: str):
        project, version = store.load(pid)
        return _versioned({"project": storage.project_to_doc(project)}, version)

    # --- mutations ------------------------------------------------------

    @app.post("/projects/{pid}/objects")
    async def add_object(pid: str, request: Request, if_match: Optional[str] = Header(None)):
        doc = await _json_body(request)

        def apply(project: Project) -> dict:
            oid = project.add_object(
                str(_require(doc, "name")),
                description=str(doc.get("description", "")),
                abstraction=_enum(Abstraction, doc.get("abstraction", "Macro"), "abstraction"),
                tags=[str(t) for t in doc.get("tags", [])],
                object_id=doc.get("id"),
                actor=str(doc.get("author", "unknown")),
            )
            return {"id": oid}

        result, version = store.mutate(pid, if_match, apply)
        return _versioned(result, version)

    @app.post("/projects/{pid}/paths")
    async def add_path(pid: str, request: Request, if_match: Optional[str] = Header(None)):
        doc = await _json_body(request)

        def apply(project: Project) -> dict:
            path_id = project.add_path(
                source=_endpoint(_require(doc, "source"), "source"),
                target=_endpoint(_require(doc, "target"), "target"),
                keywords=[str(k) for k in doc.get("keywords", [])],
                narrative=str(doc.get("narrative", "")),
                initial=_enum(
                    Classification, doc.get("classification", "Plausible"), "classification"
                ),
                phase=_opt_phase(doc),
                path_id=doc.get("id"),
                actor=str(doc.get("author", "unknown")),
            )
            off_catalog = taxonomy.validate_path_keywords(catalog, doc.get("keywords", []))
            return {"id": path_id, "off_catalog_keywords": off_catalog}

        result, version = store.mutate(pid, if_match, apply)
        return _versioned(result, version)

    @app.post("/projects/{pid}/paths/{path_id}/evidence")
    async def add_evidence(
        pid: str, path_id: str, request: Request, if_match: Optional[str] = Header(None)
    ):
        doc = await _json_body(request)

        def apply(project: Project) -> dict:
            path = project.record_evidence(
                path_id,
                text=str(_require(doc, "text")),
                author=str(doc.get("author", "unknown")),
                resulting=_enum(Classification, _require(doc, "resulting"), "resulting"),
                phase=_opt_phase(doc),
            )
            return {"id": path.id, "classification": path.classification.value}

        result, version = store.mutate(pid, if_match, apply)
        return _versioned(result, version)

    @app.post("/projects/{pid}/phase")
    async def advance_phase(pid: str, request: Request, if_match: Optional[str] = Header(None)):
        doc = await _json_body(request)

        def apply(project: Project) -> dict:
            project.advance_phase(
                _enum(LifecyclePhase, _require(doc, "phase"), "phase"),
                actor=str(doc.get("author", "unknown")),
            )
            return {"current_phase": project.current_phase.value}

        result, version = store.mutate(pid, if_match, apply)
        return _versioned(result, version)

    # --- read-side analysis ----------------------------------------------

    @app.get("/projects/{pid}/suggest")
    def suggest(
        pid: str,
        source: str = Query(...),
        target: str = Query(...),
        include_covered: bool = Query(False),
    ):
        project, version = store.load(pid)
        prompts = analysis.suggest_paths(
            project, catalog, source, target, include_covered=include_covered
        )
        return _versioned({"prompts": [_prompt_doc(p) for p in prompts]}, version)

    @app.get("/projects/{pid}/coverage")
    def coverage(pid: str, views: Optional[str] = Query(None)):
        _, version = store.load(pid)
        matrix = analysis.merge_coverage(_profiles_subset(views))
        return _versioned(
            {
                "rows": [
                    {
                        "view_id": r.view_id,
                        "title": r.title,
                        "levels": {f.value: r.levels[f].value for f in FACTOR_ORDER},
                        "notes": {f.value: note for f, note in r.notes.items()},
                    }
                    for r in matrix.rows
                ],
                "merged": {f.value: matrix.merged[f].value for f in FACTOR_ORDER},
            },
            version,
        )

    @app.get("/projects/{pid}/gaps")
    def gaps(pid: str, views: Optional[str] = Query(None), threshold: str = Query("Represented")):
        _, version = store.load(pid)
        level = _enum(analysis.RepresentationLevel, threshold, "threshold")
        result = analysis.gap_report(_profiles_subset(views), level)
        return _versioned(
            {"gaps": [{"factor": f.value, "merged_level": lv.value} for f, lv in result]},
            version,
        )

    @app.get("/projects/{pid}/stale")
    def stale(pid: str, as_of: Optional[str] = Query(None)):
        project, version = store.load(pid)
        phase = (
            _enum(LifecyclePhase, as_of, "as_of") if as_of is not None else project.current_phase
        )
        result = analysis.stale_report(project, phase)
        return _versioned(
            {"stale": [{"id": p.id, "latest_phase": p.latest_phase.value} for p in result]},
            version,
        )

    @app.get("/projects/{pid}/report")
    def report(pid: str, views: Optional[str] = Query(None), with_coverage: bool = Query(False)):
        project, version = store.load(pid)
        profiles = _profiles_subset(views) if (with_coverage or views) else None
        return _versioned({"markdown": reports.render_report(project, profiles)}, version)

    @app.get("/projects/{pid}/diagram")
    def diagram(pid: str, show_discharged: bool = Query(False)):
        project, version = store.load(pid)
        dot = reports.export_dot(project, show_discharged=show_discharged)
        return PlainTextResponse(
            dot, media_type="text/vnd.graphviz", headers={"ETag": str(version)}
        )

    @app.get("/projects/{pid}/findings")
    def findings(pid: str):
        project, version = store.load(pid)
        mapping = project.metadata.get(stpa.MAPPING_KEY, {})
        found = stpa.export_findings(project, mapping)
        return _versioned({"findings": stpa.findings_to_json(project, found)}, version)

    # --- catalog ----------------------------------------------------------

    @app.get("/catalog")
    def get_catalog():
        return {
            "version": catalog.version,
            "provenance": catalog.provenance,
            "factors": [
                {"id": s.id, "name": s.name, "parent": s.parent.value}
                for s in taxonomy.SECONDARY_FACTORS.values()
            ],
            "templates": [
                {"keyword": t.keyword, "secondary": t.secondary, "citations": list(t.citations)}
                for t in catalog.templates
            ],
        }

    @app.get("/catalog/search")
    def catalog_search(q: str = Query("")):
        hits = taxonomy.search_keywords(catalog, q)
        return [
            {"keyword": t.keyword, "secondary": t.secondary, "citations": list(t.citations)}
            for t in hits
        ]

    return app
