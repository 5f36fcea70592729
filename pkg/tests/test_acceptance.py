"""Acceptance criteria, one test per criterion.

The terminal summary (see conftest) prints one PASS/FAIL line per test here.
Tolerances are exact unless a time budget is stated inline.
"""

from __future__ import annotations

import itertools
import json
import random
import re
import shutil
import threading
import time
from importlib import resources

import pytest

from hotpie import (
    CausalEndpoint,
    Classification,
    LifecyclePhase,
    Project,
    load_default_catalog,
    load_default_profiles,
    load_example_project,
    suggest_paths,
)
from hotpie.analysis import RepresentationLevel, gap_report, merge_coverage
from hotpie.errors import HotpieError
from hotpie.model import Abstraction
from hotpie.service import create_app
from hotpie.storage import load_project, load_project_file, save_project
from hotpie.stpa import (
    Disposition,
    export_findings,
    import_control_structure,
    materialize,
    prompts_for_relations,
)
from hotpie.taxonomy import FACTOR_ORDER, SECONDARY_FACTORS, PrimaryFactor, secondaries_of

from randgen import random_project

TRANSCRIPTION_MANIFEST = {
    "H1": 18, "H2": 29, "H3": 26,
    "O1": 13, "O2": 10, "O3": 13,
    "T1": 25, "T2": 32, "T3": 6,
    "P1": 16, "P2": 19,
    "I1": 22, "I2": 12,
    "E1": 16, "E2": 17,
}


def test_catalog_fidelity():
    started = time.monotonic()
    catalog = load_default_catalog()
    assert len(PrimaryFactor) == 6
    assert len(SECONDARY_FACTORS) == 15
    assert [len(secondaries_of(f)) for f in FACTOR_ORDER] == [3, 3, 3, 2, 2, 2]
    counts: dict[str, int] = {}
    for t in catalog.templates:
        counts[t.secondary] = counts.get(t.secondary, 0) + 1
    assert counts == TRANSCRIPTION_MANIFEST
    assert time.monotonic() - started < 1.0


def test_single_view_coverage_row():
    started = time.monotonic()
    profiles = load_default_profiles()
    sv1 = next(p for p in profiles if p.view_id == "SV-1")
    merged = merge_coverage([sv1]).merged
    assert [merged[f].value for f in FACTOR_ORDER] == [
        "PartiallyRepresented",
        "Represented",
        "Represented",
        "PartiallyRepresented",
        "Represented",
        "NotRepresented",
    ]
    assert time.monotonic() - started < 1.0


def test_view_coverage_gaps():
    profiles = load_default_profiles()
    assert len(profiles) == 10
    for profile in profiles:
        assert gap_report([profile]) != [], f"{profile.view_id} unexpectedly complete"
    merged_gaps = gap_report(profiles)
    assert merged_gaps == [
        (PrimaryFactor.HUMAN, RepresentationLevel.PARTIALLY_REPRESENTED),
        (PrimaryFactor.ENVIRONMENT, RepresentationLevel.PARTIALLY_REPRESENTED),
    ]


def test_bundled_example_project():
    project = load_example_project()
    assert set(project.objects) == {
        "aircrew", "ground-crew", "aircraft-technical-systems", "runway", "environment",
    }

    cp1, cp2, cp3 = project.paths["CP1"], project.paths["CP2"], project.paths["CP3"]
    assert cp1.classification is Classification.DEFINITE
    assert cp2.classification is Classification.DEFINITE
    assert cp3.classification is Classification.PLAUSIBLE

    assert (cp1.source.object, cp1.source.primary) == ("aircrew", PrimaryFactor.HUMAN)
    assert cp1.source.secondary == "H2"
    assert (cp1.target.object, cp1.target.primary) == (
        "aircraft-technical-systems", PrimaryFactor.PROCESS,
    )
    assert cp1.keywords == ("distraction",)

    assert (cp2.source.object, cp2.source.primary) == ("environment", PrimaryFactor.ENVIRONMENT)
    assert (cp2.target.object, cp2.target.primary) == (
        "aircraft-technical-systems", PrimaryFactor.TECHNOLOGY,
    )
    assert cp2.keywords == ("adverse weather", "hydroplaning")

    assert (cp3.source.object, cp3.source.primary) == ("ground-crew", PrimaryFactor.ORGANISATION)
    assert cp3.source.secondary == "O3"
    assert (cp3.target.object, cp3.target.primary) == ("runway", PrimaryFactor.PROCESS)
    assert cp3.keywords == ("inadequate training",)

    assert [p.id for p in project.open_uncertainties()] == ["CP3"]

    # resolution scenario: the training concern is discharged
    discharged = load_example_project()
    discharged.record_evidence(
        "CP3",
        text="Ground crews subscribe to the standardised ICAO Global Runway Safety Programme.",
        author="analyst",
        resulting=Classification.DISCHARGED,
    )
    assert discharged.paths["CP3"].classification is Classification.DISCHARGED
    assert len(discharged.paths["CP3"].evidence) == 1
    assert discharged.open_uncertainties() == []

    # escalation scenario: the concern is confirmed safety-critical
    confirmed = load_example_project()
    confirmed.advance_phase(LifecyclePhase.VALIDATION)
    confirmed.record_evidence(
        "CP3",
        text="Ground crew emergency handling procedure differs from the pilot's.",
        author="analyst",
        resulting=Classification.DEFINITE,
        phase=LifecyclePhase.VALIDATION,
    )
    assert confirmed.paths["CP3"].classification is Classification.DEFINITE
    assert len(confirmed.paths["CP3"].evidence) == 1
    assert confirmed.open_uncertainties() == []


def test_prompt_enumeration():
    catalog = load_default_catalog()
    rng = random.Random(424242)
    all_pairs = set(itertools.product(FACTOR_ORDER, FACTOR_ORDER))
    for _ in range(1000):
        project = random_project(
            rng,
            n_objects=rng.randrange(2, 6),
            n_paths=rng.randrange(0, 5),
            n_evidence=0,
            n_advances=0,
        )
        a, b = rng.sample(list(project.objects), 2)

        prompts = suggest_paths(project, catalog, a, b, include_covered=True)
        assert len(prompts) == 36
        assert {(p.source_factor, p.target_factor) for p in prompts} == all_pairs

        uncovered_before = {
            (p.source_factor, p.target_factor) for p in suggest_paths(project, catalog, a, b)
        }
        pair = (rng.choice(FACTOR_ORDER), rng.choice(FACTOR_ORDER))
        project.add_path(
            CausalEndpoint(a, pair[0]), CausalEndpoint(b, pair[1]),
            initial=Classification.PLAUSIBLE,
        )
        uncovered_after = {
            (p.source_factor, p.target_factor) for p in suggest_paths(project, catalog, a, b)
        }
        assert uncovered_after == uncovered_before - {pair}


# --- randomized state-machine soak -------------------------------------------


def _check_invariants(project: Project) -> None:
    for path in project.paths.values():
        assert path.source.object in project.objects
        assert path.target.object in project.objects
        assert path.source.object != path.target.object
        if path.evidence:
            assert path.classification is path.evidence[-1].resulting_classification
            phases = [e.phase.rank for e in path.evidence]
            assert phases == sorted(phases)
            assert path.created_phase.rank <= phases[0]
            stamps = [e.timestamp for e in path.evidence]
            assert stamps == sorted(stamps)
        else:
            assert path.classification is path.initial_classification
        assert path.created_phase <= project.current_phase
    stamps = [e.timestamp for e in project.event_log]
    assert stamps == sorted(stamps)


def _random_op(rng: random.Random, project: Project) -> None:
    """Apply one random operation; invalid variants are generated on purpose."""
    objects = list(project.objects)
    paths = list(project.paths)
    choice = rng.random()
    if choice < 0.25 or len(objects) < 2:
        if rng.random() < 0.15:
            project.add_object("")  # rejected: empty name
        else:
            project.add_object(
                f"unit {rng.randrange(10**6)}",
                abstraction=rng.choice(list(Abstraction)),
                actor="soak",
            )
    elif choice < 0.55:
        roll = rng.random()
        if roll < 0.12:
            a = rng.choice(objects)
            project.add_path(CausalEndpoint(a, PrimaryFactor.HUMAN),
                             CausalEndpoint(a, PrimaryFactor.PROCESS))
        elif roll < 0.2:
            project.add_path(
                CausalEndpoint(rng.choice(objects), PrimaryFactor.HUMAN),
                CausalEndpoint("missing-object", PrimaryFactor.PROCESS),
            )
        elif roll < 0.28:
            a, b = rng.sample(objects, 2)
            project.add_path(
                CausalEndpoint(a, PrimaryFactor.HUMAN),
                CausalEndpoint(b, PrimaryFactor.PROCESS),
                initial=Classification.DISCHARGED,
            )
        elif roll < 0.36:
            a, b = rng.sample(objects, 2)
            project.add_path(
                CausalEndpoint(a, PrimaryFactor.HUMAN, "T1"),
                CausalEndpoint(b, PrimaryFactor.PROCESS),
            )
        elif roll < 0.44 and project.current_phase is not LifecyclePhase.OPERATION:
            a, b = rng.sample(objects, 2)
            project.add_path(
                CausalEndpoint(a, PrimaryFactor.HUMAN),
                CausalEndpoint(b, PrimaryFactor.PROCESS),
                phase=LifecyclePhase.OPERATION,
            )
        else:
            a, b = rng.sample(objects, 2)
            primary = rng.choice(FACTOR_ORDER)
            secondary = rng.choice(
                [None] + [s.id for s in SECONDARY_FACTORS.values() if s.parent is primary]
            )
            created = rng.choice([p for p in LifecyclePhase if p <= project.current_phase])
            project.add_path(
                CausalEndpoint(a, primary, secondary),
                CausalEndpoint(b, rng.choice(FACTOR_ORDER)),
                keywords=("soak",),
                initial=rng.choice([Classification.DEFINITE, Classification.PLAUSIBLE]),
                phase=created,
                actor="soak",
            )
    elif choice < 0.85 and paths:
        pid = rng.choice(paths)
        path = project.paths[pid]
        roll = rng.random()
        if roll < 0.1:
            project.record_evidence("missing-path", "x", "soak", Classification.DISCHARGED)
        elif roll < 0.2 and path.latest_phase is not LifecyclePhase.DESIGN:
            project.record_evidence(
                pid, "backdated", "soak", Classification.PLAUSIBLE, phase=LifecyclePhase.DESIGN
            )
        elif roll < 0.3 and project.current_phase is not LifecyclePhase.OPERATION:
            project.record_evidence(
                pid, "premature", "soak", Classification.PLAUSIBLE,
                phase=LifecyclePhase.OPERATION,
            )
        else:
            allowed = [p for p in LifecyclePhase
                       if path.latest_phase <= p <= project.current_phase]
            project.record_evidence(
                pid,
                text=f"note {rng.randrange(10**6)}",
                author=rng.choice(["soak", "unknown"]),
                resulting=rng.choice(list(Classification)),
                phase=rng.choice(allowed),
            )
    else:
        roll = rng.random()
        if roll < 0.3:
            project.advance_phase(project.current_phase)  # rejected: not a strict advance
        elif project.current_phase is LifecyclePhase.OPERATION:
            project.advance_phase(LifecyclePhase.DESIGN)  # rejected: regression
        else:
            project.advance_phase(
                LifecyclePhase(list(LifecyclePhase)[project.current_phase.rank + 1].value),
                actor="soak",
            )


def test_state_machine_properties():
    rng = random.Random(1133)
    total_steps = 10_500
    steps_per_project = 350
    rejected = accepted = 0
    for block in range(total_steps // steps_per_project):
        project = Project.create(f"soak-{block}", actor="soak")
        evidence_lengths: dict[str, int] = {}
        log_length = len(project.event_log)
        for _ in range(steps_per_project):
            before = save_project(project)
            try:
                _random_op(rng, project)
            except HotpieError:
                rejected += 1
                assert save_project(project) == before  # rejected ops change nothing
                continue
            accepted += 1
            _check_invariants(project)
            assert len(project.event_log) >= log_length  # append-only
            log_length = len(project.event_log)
            for pid, path in project.paths.items():
                assert len(path.evidence) >= evidence_lengths.get(pid, 0)
                evidence_lengths[pid] = len(path.evidence)
    assert accepted + rejected == total_steps
    assert rejected > 500  # the generator really does exercise rejection paths


def test_round_trip():
    rng = random.Random(77)
    for _ in range(50):
        project = random_project(
            rng,
            n_objects=rng.randrange(2, 7),
            n_paths=rng.randrange(0, 10),
            n_evidence=rng.randrange(0, 8),
            n_advances=rng.randrange(0, 4),
        )
        once = save_project(project)
        assert save_project(load_project(once)) == once


def test_stpa_bridge():
    catalog = load_default_catalog()
    structure = import_control_structure(
        {
            "nodes": [
                {"id": "ctl", "name": "Controller", "kind": "Controller"},
                {"id": "act", "name": "Actuator", "kind": "Actuator"},
                {"id": "proc", "name": "Process", "kind": "ControlledProcess"},
                {"id": "sen", "name": "Sensor", "kind": "Sensor"},
            ],
            "relations": [
                {"from": "ctl", "to": "act", "kind": "ControlAction"},
                {"from": "act", "to": "proc", "kind": "ControlAction"},
                {"from": "proc", "to": "sen", "kind": "Feedback"},
                {"from": "sen", "to": "ctl", "kind": "Feedback"},
            ],
        }
    )
    fresh = Project.create("loop")
    mapping = materialize(fresh, structure)
    prompts = prompts_for_relations(fresh, catalog, structure, mapping)
    assert len(prompts) == 144

    example = load_example_project()
    example_mapping = {oid: oid for oid in example.objects}
    findings = export_findings(example, example_mapping)
    assert {f.path_id: f.disposition for f in findings} == {
        "CP1": Disposition.FEED_TO_STPA,
        "CP2": Disposition.FEED_TO_STPA,
        "CP3": Disposition.TRACK_AS_UNCERTAIN,
    }
    example.record_evidence("CP3", "resolved", "a", Classification.DISCHARGED)
    after = export_findings(example, example_mapping)
    assert {f.path_id for f in after} == {"CP1", "CP2"}
    assert all(f.disposition is Disposition.FEED_TO_STPA for f in after)


def test_service_linearizability(tmp_path):
    from fastapi.testclient import TestClient

    root = tmp_path / "store"
    root.mkdir()
    with resources.files("hotpie.data").joinpath("arp4761_project.json").open("rb") as src:
        with open(root / "arp4761.json", "wb") as dst:
            shutil.copyfileobj(src, dst)
    base_text = (root / "arp4761.json").read_text(encoding="utf-8")

    app = create_app(store_root=root)
    n_workers = 100
    outcomes: list[tuple[int, int]] = []
    lock = threading.Lock()
    barrier = threading.Barrier(10)

    def worker(i: int) -> None:
        client = TestClient(app)
        try:
            barrier.wait(timeout=30)
        except threading.BrokenBarrierError:
            pass
        statuses = []
        # first attempt deliberately uses the shared starting version, so all
        # but one worker in the first wave is guaranteed stale
        version = 0
        for _ in range(n_workers + 10):
            response = client.post(
                "/projects/arp4761/objects",
                json={"name": f"tower {i}", "id": f"acc-{i}", "author": f"w{i}"},
                headers={"If-Match": str(version)},
            )
            statuses.append(response.status_code)
            if response.status_code == 200:
                break
            assert response.status_code == 409
            version = response.json()["version"]
        with lock:
            outcomes.append((i, statuses.count(200)))

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(n_workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=120)

    assert len(outcomes) == n_workers
    total_ok = sum(ok for _, ok in outcomes)
    final_version = TestClient(app).get("/projects/arp4761").json()["version"]
    assert total_ok == final_version == n_workers

    # replay the accepted sequence through the library and compare stored state
    stored = load_project_file(root / "arp4761.json")
    replayed = load_project(base_text)
    new_events = stored.event_log[len(replayed.event_log):]
    assert len(new_events) == n_workers
    for entry in new_events:
        match = re.fullmatch(r"add object 'acc-(\d+)'", entry.action)
        assert match, entry.action
        i = int(match.group(1))
        replayed.add_object(
            f"tower {i}", object_id=f"acc-{i}", actor=entry.actor, timestamp=entry.timestamp
        )
    assert save_project(replayed) == save_project(stored)
