"""Bridge to STPA-style hazard analysis.

Imports a safety control structure (a minimal, tool-agnostic JSON format of
nodes and control/feedback relations), materializes its nodes as project
objects, walks the factor-pair prompts along each control relation, and
exports dispositions back out: Definite paths feed the host analysis, while
Plausible ones stay tracked as open uncertainties. The STPA steps themselves
(unsafe control actions, loss scenarios) are out of scope; this module only
feeds and consumes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Optional, Union

from .analysis import SuggestionPrompt, suggest_paths
from .errors import DanglingRelation, MalformedStructure, UnknownObject
from .model import Classification, Project
from .storage import format_timestamp
from .taxonomy import ReferenceCatalog

MAPPING_KEY = "stpa_mapping"


class NodeKind(Enum):
    CONTROLLER = "Controller"
    ACTUATOR = "Actuator"
    CONTROLLED_PROCESS = "ControlledProcess"
    SENSOR = "Sensor"
    HUMAN = "Human"


class RelationKind(Enum):
    CONTROL_ACTION = "ControlAction"
    FEEDBACK = "Feedback"


@dataclass(frozen=True)
class ControlNode:
    id: str
    name: str
    kind: NodeKind


@dataclass(frozen=True)
class ControlRelation:
    from_node: str
    to_node: str
    kind: RelationKind
    label: str = ""


@dataclass(frozen=True)
class ControlStructure:
    nodes: tuple[ControlNode, ...]
    relations: tuple[ControlRelation, ...]

    def node(self, node_id: str) -> ControlNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise DanglingRelation(f"unknown node {node_id!r}")


class Disposition(Enum):
    FEED_TO_STPA = "FeedToSTPA"
    TRACK_AS_UNCERTAIN = "TrackAsUncertain"


@dataclass(frozen=True)
class AugmentationFinding:
    path_id: str
    disposition: Disposition


def import_control_structure(source: Union[str, Path, IO[str], dict]) -> ControlStructure:
    """Parse and validate a control-structure document.

    Accepts a path, an open stream, or an already-decoded dict. Relations
    must reference declared nodes and node ids must be unique.
    """
    if isinstance(source, dict):
        doc = source
    else:
        if isinstance(source, (str, Path)):
            try:
                text = Path(source).read_text(encoding="utf-8")
            except OSError as exc:
                raise MalformedStructure(f"cannot read structure: {exc}") from exc
        else:
            text = source.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedStructure(f"structure is not valid JSON: {exc}") from exc

    if not isinstance(doc, dict) or "nodes" not in doc or "relations" not in doc:
        raise MalformedStructure("structure must be an object with 'nodes' and 'relations'")

    nodes: list[ControlNode] = []
    ids: set[str] = set()
    for ndoc in doc["nodes"]:
        if not isinstance(ndoc, dict) or not {"id", "name", "kind"} <= ndoc.keys():
            raise MalformedStructure(f"bad node entry: {ndoc!r}")
        try:
            kind = NodeKind(ndoc["kind"])
        except ValueError:
            raise MalformedStructure(f"unknown node kind {ndoc['kind']!r}") from None
        nid = str(ndoc["id"])
        if nid in ids:
            raise MalformedStructure(f"duplicate node id {nid!r}")
        ids.add(nid)
        nodes.append(ControlNode(id=nid, name=str(ndoc["name"]), kind=kind))

    relations: list[ControlRelation] = []
    for rdoc in doc["relations"]:
        if not isinstance(rdoc, dict) or not {"from", "to", "kind"} <= rdoc.keys():
            raise MalformedStructure(f"bad relation entry: {rdoc!r}")
        try:
            kind = RelationKind(rdoc["kind"])
        except ValueError:
            raise MalformedStructure(f"unknown relation kind {rdoc['kind']!r}") from None
        for end in (rdoc["from"], rdoc["to"]):
            if end not in ids:
                raise DanglingRelation(f"relation references unknown node {end!r}")
        relations.append(
            ControlRelation(
                from_node=rdoc["from"],
                to_node=rdoc["to"],
                kind=kind,
                label=str(rdoc.get("label", "")),
            )
        )

    return ControlStructure(nodes=tuple(nodes), relations=tuple(relations))


def materialize(
    project: Project,
    structure: ControlStructure,
    *,
    actor: str = "unknown",
) -> dict[str, str]:
    """Ensure every control node has a project object; return node -> object.

    Idempotent: mappings already recorded in the project metadata are reused,
    so re-running on the same project creates nothing new. Each created
    object carries its node kind as a tag.
    """
    mapping: dict[str, str] = dict(project.metadata.get(MAPPING_KEY, {}))
    for node in structure.nodes:
        existing = mapping.get(node.id)
        if existing is not None and existing in project.objects:
            continue
        oid = project.add_object(
            name=node.name,
            description=f"Imported from the safety control structure ({node.kind.value}).",
            tags=("stpa", f"kind:{node.kind.value}"),
            actor=actor,
        )
        mapping[node.id] = oid
    project.metadata[MAPPING_KEY] = mapping
    return mapping


def prompts_for_relations(
    project: Project,
    catalog: ReferenceCatalog,
    structure: ControlStructure,
    mapping: dict[str, str],
) -> list[SuggestionPrompt]:
    """Uncovered factor-pair prompts along each control relation.

    Repeated node pairs are walked once (first relation wins), in relation
    order, so the output is deterministic. The mapping must cover every node
    the relations touch.
    """
    prompts: list[SuggestionPrompt] = []
    seen_pairs: set[tuple[str, str]] = set()
    for rel in structure.relations:
        for end in (rel.from_node, rel.to_node):
            if end not in mapping:
                raise UnknownObject(f"node {end!r} has no mapped object")
        pair = (mapping[rel.from_node], mapping[rel.to_node])
        if pair in seen_pairs:
            continue
        seen_pairs.add(pair)
        prompts.extend(
            suggest_paths(project, catalog, pair[0], pair[1], include_covered=False)
        )
    return prompts


def export_findings(project: Project, mapping: dict[str, str]) -> list[AugmentationFinding]:
    """Dispositions for every non-Discharged path inside the mapped scope.

    A path is in scope when both endpoint objects are materialized nodes.
    Definite paths feed the host analysis; Plausible ones are tracked.
    """
    scope = set(mapping.values())
    findings = []
    for path in sorted(project.paths.values(), key=lambda p: p.id):
        if path.classification is Classification.DISCHARGED:
            continue
        if path.source.object not in scope or path.target.object not in scope:
            continue
        disposition = (
            Disposition.FEED_TO_STPA
            if path.classification is Classification.DEFINITE
            else Disposition.TRACK_AS_UNCERTAIN
        )
        findings.append(AugmentationFinding(path_id=path.id, disposition=disposition))
    return findings


def findings_to_json(project: Project, findings: list[AugmentationFinding]) -> list[dict]:
    """JSON-ready form of findings, with endpoint and evidence context."""
    out = []
    for f in findings:
        path = project.paths[f.path_id]
        latest = path.evidence[-1] if path.evidence else None
        out.append(
            {
                "path_id": f.path_id,
                "disposition": f.disposition.value,
                "source": {"object": path.source.object, "factor": path.source.primary.value},
                "target": {"object": path.target.object, "factor": path.target.primary.value},
                "keywords": list(path.keywords),
                "latest_evidence": None
                if latest is None
                else {
                    "timestamp": format_timestamp(latest.timestamp),
                    "text": latest.text,
                    "resulting_classification": latest.resulting_classification.value,
                },
            }
        )
    return out


def findings_markdown(project: Project, findings: list[AugmentationFinding]) -> str:
    """Findings as a Markdown table."""
    lines = [
        "| Path | Endpoints | Keywords | Disposition | Latest evidence |",
        "| --- | --- | --- | --- | --- |",
    ]
    for f in findings:
        path = project.paths[f.path_id]
        endpoints = (
            f"{path.source.object}/{path.source.primary.letter} -> "
            f"{path.target.object}/{path.target.primary.letter}"
        )
        keywords = ", ".join(path.keywords) or "-"
        latest = path.evidence[-1].text if path.evidence else "-"
        lines.append(
            f"| {f.path_id} | {endpoints} | {keywords} | {f.disposition.value} | {latest} |"
        )
    return "\n".join(lines) + "\n"
