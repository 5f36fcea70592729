"""Project persistence: canonical JSON documents, schema version "1".

Serialization is canonical on purpose: keys sorted, timestamps rendered as
RFC 3339 UTC with fixed microsecond precision, lists kept in their
insertion (audit) order. Saving the same project twice yields byte-identical
text, so golden files and round-trip checks can compare exactly.

Loading re-validates every model invariant; a document that parses but
violates one (dangling endpoint, classification out of step with its
evidence, time or phase running backwards) is rejected with IntegrityError
rather than repaired.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Union

from .errors import IntegrityError, SchemaMismatch
from .model import (
    Abstraction,
    CausalEndpoint,
    CausalPath,
    Classification,
    EventLogEntry,
    EvidenceEntry,
    LifecyclePhase,
    Project,
    SystemObject,
)
from .taxonomy import SECONDARY_FACTORS, PrimaryFactor

SCHEMA_VERSION = "1"


def format_timestamp(ts: datetime) -> str:
    """RFC 3339 UTC with exactly six fractional digits."""
    ts = ts.astimezone(timezone.utc)
    return f"{ts:%Y-%m-%dT%H:%M:%S}.{ts.microsecond:06d}Z"


def parse_timestamp(text: str) -> datetime:
    try:
        return datetime.fromisoformat(text.replace("Z", "+00:00")).astimezone(timezone.utc)
    except ValueError as exc:
        raise IntegrityError(f"bad timestamp {text!r}: {exc}") from exc


def _endpoint_doc(e: CausalEndpoint) -> dict:
    return {"object": e.object, "primary": e.primary.value, "secondary": e.secondary}


def project_to_doc(project: Project) -> dict:
    """Plain-dict form of a project, as stored on disk and on the wire."""
    return {
        "schema_version": project.schema_version,
        "id": project.id,
        "name": project.name,
        "current_phase": project.current_phase.value,
        "metadata": project.metadata,
        "objects": [
            {
                "id": o.id,
                "name": o.name,
                "description": o.description,
                "abstraction": o.abstraction.value,
                "tags": list(o.tags),
            }
            for o in project.objects.values()
        ],
        "paths": [
            {
                "id": p.id,
                "source": _endpoint_doc(p.source),
                "target": _endpoint_doc(p.target),
                "keywords": list(p.keywords),
                "narrative": p.narrative,
                "classification": p.classification.value,
                "initial_classification": p.initial_classification.value,
                "created_phase": p.created_phase.value,
                "evidence": [
                    {
                        "timestamp": format_timestamp(e.timestamp),
                        "phase": e.phase.value,
                        "author": e.author,
                        "text": e.text,
                        "resulting_classification": e.resulting_classification.value,
                    }
                    for e in p.evidence
                ],
            }
            for p in project.paths.values()
        ],
        "event_log": [
            {
                "timestamp": format_timestamp(entry.timestamp),
                "actor": entry.actor,
                "action": entry.action,
            }
            for entry in project.event_log
        ],
    }


def save_project(project: Project) -> str:
    """Canonical JSON text for a project."""
    return json.dumps(project_to_doc(project), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_project_file(project: Project, path: Union[str, Path]) -> None:
    Path(path).write_text(save_project(project), encoding="utf-8")


def _enum_value(enum_cls, raw, what: str):
    try:
        return enum_cls(raw)
    except ValueError:
        raise IntegrityError(f"bad {what}: {raw!r}") from None


def _parse_endpoint(doc: dict, path_id: str) -> CausalEndpoint:
    primary = _enum_value(PrimaryFactor, doc.get("primary"), f"primary factor on {path_id}")
    secondary = doc.get("secondary")
    if secondary is not None and secondary not in SECONDARY_FACTORS:
        raise IntegrityError(f"path {path_id}: unknown secondary factor {secondary!r}")
    return CausalEndpoint(object=doc.get("object"), primary=primary, secondary=secondary)


def doc_to_project(doc: object) -> Project:
    """Rebuild and validate a project from its plain-dict form."""
    if not isinstance(doc, dict):
        raise IntegrityError("project document root must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(f"unsupported schema_version {version!r}, expected {SCHEMA_VERSION!r}")

    project = Project(
        id=str(doc.get("id", "")),
        name=str(doc.get("name", "")),
        current_phase=_enum_value(LifecyclePhase, doc.get("current_phase"), "current_phase"),
        metadata=doc.get("metadata") or {},
    )
    if not project.id:
        raise IntegrityError("project id must be non-empty")

    for odoc in doc.get("objects", []):
        oid = odoc.get("id")
        if not oid or not odoc.get("name"):
            raise IntegrityError(f"object entry missing id or name: {odoc!r}")
        if oid in project.objects:
            raise IntegrityError(f"duplicate object id {oid!r}")
        project.objects[oid] = SystemObject(
            id=oid,
            name=odoc["name"],
            description=odoc.get("description", ""),
            abstraction=_enum_value(Abstraction, odoc.get("abstraction", "Macro"), "abstraction"),
            tags=tuple(odoc.get("tags", [])),
        )

    for pdoc in doc.get("paths", []):
        pid = pdoc.get("id")
        if not pid:
            raise IntegrityError(f"path entry missing id: {pdoc!r}")
        if pid in project.paths:
            raise IntegrityError(f"duplicate path id {pid!r}")
        source = _parse_endpoint(pdoc.get("source", {}), pid)
        target = _parse_endpoint(pdoc.get("target", {}), pid)
        for endpoint in (source, target):
            if endpoint.object not in project.objects:
                raise IntegrityError(f"path {pid}: unknown object {endpoint.object!r}")
            try:
                endpoint.validate_factors()
            except Exception as exc:
                raise IntegrityError(f"path {pid}: {exc}") from None
        if source.object == target.object:
            raise IntegrityError(f"path {pid}: source and target are the same object")

        created_phase = _enum_value(
            LifecyclePhase, pdoc.get("created_phase"), f"created_phase of {pid}"
        )
        if created_phase > project.current_phase:
            raise IntegrityError(f"path {pid}: created after the project's current phase")
        classification = _enum_value(
            Classification, pdoc.get("classification"), f"classification of {pid}"
        )
        initial = _enum_value(
            Classification,
            pdoc.get("initial_classification", pdoc.get("classification")),
            f"initial classification of {pid}",
        )
        if initial is Classification.DISCHARGED:
            raise IntegrityError(f"path {pid}: cannot have started out Discharged")

        evidence: list[EvidenceEntry] = []
        prev_phase = created_phase
        prev_ts = None
        for edoc in pdoc.get("evidence", []):
            entry = EvidenceEntry(
                timestamp=parse_timestamp(edoc.get("timestamp", "")),
                phase=_enum_value(LifecyclePhase, edoc.get("phase"), f"evidence phase on {pid}"),
                author=edoc.get("author", "unknown"),
                text=edoc.get("text", ""),
                resulting_classification=_enum_value(
                    Classification,
                    edoc.get("resulting_classification"),
                    f"evidence classification on {pid}",
                ),
            )
            if entry.phase < prev_phase:
                raise IntegrityError(f"path {pid}: evidence phases regress")
            if entry.phase > project.current_phase:
                raise IntegrityError(f"path {pid}: evidence beyond the project phase")
            if prev_ts is not None and entry.timestamp < prev_ts:
                raise IntegrityError(f"path {pid}: evidence timestamps regress")
            prev_phase, prev_ts = entry.phase, entry.timestamp
            evidence.append(entry)
        if evidence and evidence[-1].resulting_classification is not classification:
            raise IntegrityError(
                f"path {pid}: classification {classification.value!r} disagrees with "
                f"its last evidence entry"
            )
        if not evidence and classification is not initial:
            raise IntegrityError(
                f"path {pid}: classification {classification.value!r} disagrees with "
                f"its initial classification (no evidence recorded)"
            )

        project.paths[pid] = CausalPath(
            id=pid,
            source=source,
            target=target,
            keywords=tuple(pdoc.get("keywords", [])),
            narrative=pdoc.get("narrative", ""),
            classification=classification,
            created_phase=created_phase,
            initial_classification=initial,
            evidence=evidence,
        )

    prev_ts = None
    for ldoc in doc.get("event_log", []):
        entry = EventLogEntry(
            timestamp=parse_timestamp(ldoc.get("timestamp", "")),
            actor=ldoc.get("actor", "unknown"),
            action=ldoc.get("action", ""),
        )
        if prev_ts is not None and entry.timestamp < prev_ts:
            raise IntegrityError("event log timestamps regress")
        prev_ts = entry.timestamp
        project.event_log.append(entry)

    return project


def load_project(text: str) -> Project:
    """Parse and validate a project document from JSON text."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IntegrityError(f"project document is not valid JSON: {exc}") from exc
    return doc_to_project(doc)


def load_project_file(source: Union[str, Path, IO[str]]) -> Project:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    return load_project(text)


def load_example_project() -> Project:
    """The bundled aircraft ground-deceleration example (objects CP1-CP3)."""
    from importlib import resources

    with resources.files("hotpie.data").joinpath("arp4761_project.json").open(
        "r", encoding="utf-8"
    ) as fh:
        return load_project(fh.read())
