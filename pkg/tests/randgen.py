"""Seeded random project builder used by the property suites.

Drives the real operation set (never pokes fields directly), with explicit
timestamps so generated projects are fully deterministic for a given seed.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from hotpie import (
    Abstraction,
    CausalEndpoint,
    Classification,
    LifecyclePhase,
    Project,
)
from hotpie.taxonomy import FACTOR_ORDER, SECONDARY_FACTORS

BASE_TIME = datetime(2024, 1, 1, tzinfo=timezone.utc)

PHASES = list(LifecyclePhase)
WORDS = [
    "pump", "relay", "crew", "tower", "sensor", "gateway", "procedure",
    "charger", "antenna", "valve", "console", "beacon",
]


class Clock:
    def __init__(self):
        self.tick = 0

    def next(self) -> datetime:
        self.tick += 1
        return BASE_TIME + timedelta(seconds=self.tick)


def random_endpoint(rng: random.Random, object_id: str) -> CausalEndpoint:
    primary = rng.choice(FACTOR_ORDER)
    secondary = None
    if rng.random() < 0.5:
        secondary = rng.choice([s.id for s in SECONDARY_FACTORS.values() if s.parent is primary])
    return CausalEndpoint(object=object_id, primary=primary, secondary=secondary)


def random_project(rng: random.Random, n_objects: int = 5, n_paths: int = 6,
                   n_evidence: int = 4, n_advances: int = 2) -> Project:
    clock = Clock()
    project = Project.create(
        f"project-{rng.randrange(10**6)}", actor="gen", timestamp=clock.next()
    )
    for i in range(n_objects):
        project.add_object(
            f"{rng.choice(WORDS)} {i}",
            description=rng.choice(["", "critical asset", "support function"]),
            abstraction=rng.choice(list(Abstraction)),
            tags=rng.sample(["ext", "new", "legacy"], k=rng.randrange(3)),
            actor="gen",
            timestamp=clock.next(),
        )
    objects = list(project.objects)

    for _ in range(n_advances):
        if rng.random() < 0.5 and project.current_phase is not PHASES[-1]:
            project.advance_phase(
                PHASES[project.current_phase.rank + 1], actor="gen", timestamp=clock.next()
            )

    for _ in range(n_paths):
        src, dst = rng.sample(objects, 2)
        created = rng.choice([p for p in PHASES if p <= project.current_phase])
        project.add_path(
            source=random_endpoint(rng, src),
            target=random_endpoint(rng, dst),
            keywords=rng.sample(["expertise", "weather", "fatigue", "procedure"], k=rng.randrange(3)),
            narrative=rng.choice(["", "suspected influence", "raised in review"]),
            initial=rng.choice([Classification.DEFINITE, Classification.PLAUSIBLE]),
            phase=created,
            actor="gen",
            timestamp=clock.next(),
        )

    path_ids = list(project.paths)
    for _ in range(n_evidence):
        if not path_ids:
            break
        pid = rng.choice(path_ids)
        path = project.paths[pid]
        allowed = [p for p in PHASES if path.latest_phase <= p <= project.current_phase]
        project.record_evidence(
            pid,
            text=rng.choice(["test report received", "supplier confirmed", "trial observation"]),
            author=rng.choice(["alice", "bo", "unknown"]),
            resulting=rng.choice(list(Classification)),
            phase=rng.choice(allowed),
            timestamp=clock.next(),
        )
    return project
