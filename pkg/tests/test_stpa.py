from __future__ import annotations

import io
import json

import pytest

from hotpie.errors import DanglingRelation, MalformedStructure, UnknownObject
from hotpie.model import CausalEndpoint, Classification, Project
from hotpie.stpa import (
    MAPPING_KEY,
    Disposition,
    export_findings,
    findings_markdown,
    findings_to_json,
    import_control_structure,
    materialize,
    prompts_for_relations,
)
from hotpie.taxonomy import PrimaryFactor

MINIMAL_LOOP = {
    "nodes": [
        {"id": "ctl", "name": "Flight controller", "kind": "Controller"},
        {"id": "act", "name": "Brake actuator", "kind": "Actuator"},
        {"id": "proc", "name": "Deceleration", "kind": "ControlledProcess"},
        {"id": "sen", "name": "Wheel sensor", "kind": "Sensor"},
    ],
    "relations": [
        {"from": "ctl", "to": "act", "kind": "ControlAction", "label": "apply brakes"},
        {"from": "act", "to": "proc", "kind": "ControlAction", "label": "brake force"},
        {"from": "proc", "to": "sen", "kind": "Feedback", "label": "wheel speed"},
        {"from": "sen", "to": "ctl", "kind": "Feedback", "label": "speed signal"},
    ],
}


def _loop():
    return import_control_structure(json.loads(json.dumps(MINIMAL_LOOP)))


def test_import_minimal_loop():
    structure = _loop()
    assert len(structure.nodes) == 4
    assert len(structure.relations) == 4
    assert structure.node("ctl").kind.value == "Controller"


def test_import_from_stream():
    structure = import_control_structure(io.StringIO(json.dumps(MINIMAL_LOOP)))
    assert len(structure.nodes) == 4


def test_import_rejects_dangling_relation():
    doc = json.loads(json.dumps(MINIMAL_LOOP))
    doc["relations"].append({"from": "ctl", "to": "ghost", "kind": "Feedback"})
    with pytest.raises(DanglingRelation):
        import_control_structure(doc)


def test_import_rejects_relation_without_nodes():
    with pytest.raises(DanglingRelation):
        import_control_structure(
            {"nodes": [], "relations": [{"from": "a", "to": "b", "kind": "Feedback"}]}
        )


def test_import_rejects_malformed():
    with pytest.raises(MalformedStructure):
        import_control_structure({"nodes": []})
    with pytest.raises(MalformedStructure):
        import_control_structure(io.StringIO("nope"))
    doc = json.loads(json.dumps(MINIMAL_LOOP))
    doc["nodes"][0]["kind"] = "Wizard"
    with pytest.raises(MalformedStructure):
        import_control_structure(doc)
    doc = json.loads(json.dumps(MINIMAL_LOOP))
    doc["nodes"].append(dict(doc["nodes"][0]))
    with pytest.raises(MalformedStructure):
        import_control_structure(doc)


def test_materialize_creates_one_object_per_node():
    project = Project.create("loop")
    mapping = materialize(project, _loop())
    assert len(project.objects) == 4
    assert set(mapping) == {"ctl", "act", "proc", "sen"}
    tags = project.objects[mapping["ctl"]].tags
    assert "kind:Controller" in tags


def test_materialize_is_idempotent():
    project = Project.create("loop")
    first = materialize(project, _loop())
    second = materialize(project, _loop())
    assert first == second
    assert len(project.objects) == 4
    assert project.metadata[MAPPING_KEY] == first


def test_materialize_keeps_unrelated_objects():
    project = Project.create("loop")
    project.add_object("bystander")
    materialize(project, _loop())
    assert len(project.objects) == 5


def test_prompts_for_relations_counts():
    project = Project.create("loop")
    structure = _loop()
    mapping = materialize(project, structure)
    from hotpie import load_default_catalog

    catalog = load_default_catalog()
    prompts = prompts_for_relations(project, catalog, structure, mapping)
    assert len(prompts) == 4 * 36

    project.add_path(
        CausalEndpoint(mapping["ctl"], PrimaryFactor.HUMAN),
        CausalEndpoint(mapping["act"], PrimaryFactor.TECHNOLOGY),
        keywords=("interface",),
        initial=Classification.PLAUSIBLE,
    )
    assert len(prompts_for_relations(project, catalog, structure, mapping)) == 143


def test_prompts_dedupe_repeated_pairs(catalog):
    project = Project.create("loop")
    doc = json.loads(json.dumps(MINIMAL_LOOP))
    doc["relations"].append(
        {"from": "ctl", "to": "act", "kind": "ControlAction", "label": "release brakes"}
    )
    structure = import_control_structure(doc)
    mapping = materialize(project, structure)
    assert len(prompts_for_relations(project, catalog, structure, mapping)) == 144


def test_prompts_require_complete_mapping(catalog):
    project = Project.create("loop")
    structure = _loop()
    mapping = materialize(project, structure)
    del mapping["sen"]
    with pytest.raises(UnknownObject):
        prompts_for_relations(project, catalog, structure, mapping)


def test_prompts_empty_without_relations(catalog):
    project = Project.create("loop")
    structure = import_control_structure({"nodes": MINIMAL_LOOP["nodes"], "relations": []})
    mapping = materialize(project, structure)
    assert prompts_for_relations(project, catalog, structure, mapping) == []


def test_export_findings_partitions_by_classification(arp):
    mapping = {oid: oid for oid in arp.objects}
    findings = export_findings(arp, mapping)
    assert {f.path_id: f.disposition for f in findings} == {
        "CP1": Disposition.FEED_TO_STPA,
        "CP2": Disposition.FEED_TO_STPA,
        "CP3": Disposition.TRACK_AS_UNCERTAIN,
    }


def test_export_findings_skips_discharged(arp):
    mapping = {oid: oid for oid in arp.objects}
    for pid in list(arp.paths):
        arp.record_evidence(pid, "closed out", "a", Classification.DISCHARGED)
    assert export_findings(arp, mapping) == []


def test_export_findings_requires_both_endpoints_mapped(arp):
    mapping = {oid: oid for oid in arp.objects if oid != "runway"}
    ids = {f.path_id for f in export_findings(arp, mapping)}
    assert ids == {"CP1", "CP2"}  # CP3 targets the unmapped runway


def test_findings_renderings(arp):
    mapping = {oid: oid for oid in arp.objects}
    findings = export_findings(arp, mapping)
    md = findings_markdown(arp, findings)
    assert md.splitlines()[0].startswith("| Path |")
    assert "| CP3 |" in md and "TrackAsUncertain" in md
    doc = findings_to_json(arp, findings)
    assert [d["path_id"] for d in doc] == ["CP1", "CP2", "CP3"]
    assert doc[0]["latest_evidence"] is None
