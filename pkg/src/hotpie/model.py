"""Core causal-relationship model.

A Project holds system objects and the micro-level causal paths between
their factor endpoints. Each path carries a classification that evolves only
through appended evidence entries, so the audit trail is the state machine:
any (from -> to) transition is allowed, including no-change entries and
reopening a Discharged path, but every one of them costs an evidence record.
Nothing is ever deleted; resolved paths are Discharged and kept.

Macro-level relationships are intentionally not stored: two objects are
macro-linked exactly when at least one causal path joins them (see
``Project.macro_relations``), so the macro view can never disagree with the
micro one.

Concurrency: a Project is correct under single-writer access; the HTTP
service serializes writers per project.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import (
    DuplicateId,
    EmptyName,
    FactorMismatch,
    InvalidInitial,
    PhaseRegression,
    SelfLoop,
    UnknownObject,
    UnknownPath,
)
from .taxonomy import PrimaryFactor, secondary_factor


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


class Abstraction(Enum):
    MACRO = "Macro"
    MICRO = "Micro"


class Classification(Enum):
    """Disposition of a causal path.

    Definite: confirmed safety-critical; feeds the hazard analysis.
    Plausible: suspected but uncertain; tracked until information arrives.
    Discharged: resolved not safety-critical; kept for the record.
    """

    DEFINITE = "Definite"
    PLAUSIBLE = "Plausible"
    DISCHARGED = "Discharged"


class LifecyclePhase(Enum):
    """System lifecycle phases, totally ordered. A project only moves forward."""

    DESIGN = "Design"
    ACQUISITION = "Acquisition"
    VALIDATION = "Validation"
    DEPLOYMENT = "Deployment"
    OPERATION = "Operation"

    @property
    def rank(self) -> int:
        return _PHASE_RANK[self]

    def __lt__(self, other: "LifecyclePhase") -> bool:
        return self.rank < other.rank

    def __le__(self, other: "LifecyclePhase") -> bool:
        return self.rank <= other.rank

    def __gt__(self, other: "LifecyclePhase") -> bool:
        return self.rank > other.rank

    def __ge__(self, other: "LifecyclePhase") -> bool:
        return self.rank >= other.rank


_PHASE_RANK = {p: i for i, p in enumerate(LifecyclePhase)}


@dataclass
class SystemObject:
    id: str
    name: str
    description: str = ""
    abstraction: Abstraction = Abstraction.MACRO
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class CausalEndpoint:
    """One end of a causal path: a factor vertex of a specific object."""

    object: str
    primary: PrimaryFactor
    secondary: Optional[str] = None

    def validate_factors(self) -> None:
        if self.secondary is not None:
            parent = secondary_factor(self.secondary).parent
            if parent is not self.primary:
                raise FactorMismatch(
                    f"{self.secondary} belongs to {parent.value}, not {self.primary.value}"
                )


@dataclass(frozen=True)
class EvidenceEntry:
    timestamp: datetime
    phase: LifecyclePhase
    author: str
    text: str
    resulting_classification: Classification


@dataclass
class CausalPath:
    id: str
    source: CausalEndpoint
    target: CausalEndpoint
    keywords: tuple[str, ...]
    narrative: str
    classification: Classification
    created_phase: LifecyclePhase
    initial_classification: Classification = Classification.PLAUSIBLE
    evidence: list[EvidenceEntry] = field(default_factory=list)

    def was_ever_definite(self) -> bool:
        """True when the path was Definite at any point in its history."""
        return self.initial_classification is Classification.DEFINITE or any(
            e.resulting_classification is Classification.DEFINITE for e in self.evidence
        )

    @property
    def latest_phase(self) -> LifecyclePhase:
        """Phase of the most recent evidence entry, or the creation phase."""
        return self.evidence[-1].phase if self.evidence else self.created_phase


@dataclass(frozen=True)
class EventLogEntry:
    timestamp: datetime
    actor: str
    action: str


def _slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "obj"


@dataclass
class Project:
    """One hazard-analysis session: objects, paths, and its audit log."""

    id: str
    name: str
    current_phase: LifecyclePhase = LifecyclePhase.DESIGN
    objects: dict[str, SystemObject] = field(default_factory=dict)
    paths: dict[str, CausalPath] = field(default_factory=dict)
    event_log: list[EventLogEntry] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    schema_version: str = "1"

    # --- construction -----------------------------------------------------

    @classmethod
    def create(
        cls,
        name: str,
        project_id: Optional[str] = None,
        *,
        phase: LifecyclePhase = LifecyclePhase.DESIGN,
        actor: str = "unknown",
        timestamp: Optional[datetime] = None,
    ) -> "Project":
        if not name.strip():
            raise EmptyName("project name must be non-empty")
        project = cls(id=project_id or _slugify(name), name=name, current_phase=phase)
        project._log(actor, f"create project {project.id!r}", timestamp)
        return project

    # --- internals ----------------------------------------------------------

    def _log(self, actor: str, action: str, timestamp: Optional[datetime]) -> datetime:
        ts = timestamp or utc_now()
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=timezone.utc)
        if self.event_log and ts < self.event_log[-1].timestamp:
            # never let a slow clock (or an explicit early stamp) break the
            # append-only ordering of the log
            ts = self.event_log[-1].timestamp
        self.event_log.append(EventLogEntry(ts, actor, action))
        return ts

    def _fresh_id(self, base: str, taken: Iterable[str]) -> str:
        lowered = {t.lower() for t in taken}
        if base.lower() not in lowered:
            return base
        n = 2
        while f"{base}-{n}".lower() in lowered:
            n += 1
        return f"{base}-{n}"

    def get_object(self, object_id: str) -> SystemObject:
        try:
            return self.objects[object_id]
        except KeyError:
            raise UnknownObject(f"no object with id {object_id!r}") from None

    def get_path(self, path_id: str) -> CausalPath:
        try:
            return self.paths[path_id]
        except KeyError:
            raise UnknownPath(f"no causal path with id {path_id!r}") from None

    # --- operations ---------------------------------------------------------

    def add_object(
        self,
        name: str,
        description: str = "",
        abstraction: Abstraction = Abstraction.MACRO,
        tags: Sequence[str] = (),
        *,
        object_id: Optional[str] = None,
        actor: str = "unknown",
        timestamp: Optional[datetime] = None,
    ) -> str:
        """Add a system object and return its id."""
        if not name.strip():
            raise EmptyName("object name must be non-empty")
        oid = object_id or self._fresh_id(_slugify(name), self.objects)
        if oid in self.objects:
            raise DuplicateId(f"object id {oid!r} already exists")
        self.objects[oid] = SystemObject(
            id=oid,
            name=name,
            description=description,
            abstraction=abstraction,
            tags=tuple(tags),
        )
        self._log(actor, f"add object {oid!r}", timestamp)
        return oid

    def add_path(
        self,
        source: CausalEndpoint,
        target: CausalEndpoint,
        keywords: Sequence[str] = (),
        narrative: str = "",
        initial: Classification = Classification.PLAUSIBLE,
        phase: Optional[LifecyclePhase] = None,
        *,
        path_id: Optional[str] = None,
        actor: str = "unknown",
        timestamp: Optional[datetime] = None,
    ) -> str:
        """Record a causal path between two factor endpoints; returns its id.

        The initial classification must be Definite or Plausible: a path
        nobody suspected of being safety-critical would never be recorded, so
        starting out Discharged is rejected.
        """
        self.get_object(source.object)
        self.get_object(target.object)
        if source.object == target.object:
            raise SelfLoop("a causal path must link two distinct objects")
        if initial is Classification.DISCHARGED:
            raise InvalidInitial("a new path cannot start out Discharged")
        source.validate_factors()
        target.validate_factors()
        created = phase if phase is not None else self.current_phase
        if created > self.current_phase:
            raise PhaseRegression(
                f"creation phase {created.value} is beyond the project phase "
                f"{self.current_phase.value}"
            )
        pid = path_id or self._fresh_id(f"cp{len(self.paths) + 1}", self.paths)
        if pid in self.paths:
            raise DuplicateId(f"path id {pid!r} already exists")
        self.paths[pid] = CausalPath(
            id=pid,
            source=source,
            target=target,
            keywords=tuple(keywords),
            narrative=narrative,
            classification=initial,
            created_phase=created,
            initial_classification=initial,
        )
        self._log(actor, f"add path {pid!r} as {initial.value}", timestamp)
        return pid

    def record_evidence(
        self,
        path_id: str,
        text: str,
        author: str,
        resulting: Classification,
        phase: Optional[LifecyclePhase] = None,
        *,
        timestamp: Optional[datetime] = None,
    ) -> CausalPath:
        """Append an evidence entry and move the path to ``resulting``.

        Every transition is permitted, including ones that leave the
        classification unchanged (new information that keeps the uncertainty
        open) and Discharged -> Plausible reopenings. The entry's phase may
        not precede the path's latest phase nor exceed the project phase.
        """
        path = self.get_path(path_id)
        at = phase if phase is not None else self.current_phase
        if at < path.latest_phase:
            raise PhaseRegression(
                f"evidence phase {at.value} precedes the path's latest phase "
                f"{path.latest_phase.value}"
            )
        if at > self.current_phase:
            raise PhaseRegression(
                f"evidence phase {at.value} is beyond the project phase "
                f"{self.current_phase.value}"
            )
        ts = self._log(author, f"evidence on {path_id!r} -> {resulting.value}", timestamp)
        if path.evidence and ts < path.evidence[-1].timestamp:
            ts = path.evidence[-1].timestamp
        path.evidence.append(
            EvidenceEntry(
                timestamp=ts,
                phase=at,
                author=author,
                text=text,
                resulting_classification=resulting,
            )
        )
        path.classification = resulting
        return path

    def advance_phase(
        self,
        phase: LifecyclePhase,
        *,
        actor: str = "unknown",
        timestamp: Optional[datetime] = None,
    ) -> "Project":
        """Move the project to a strictly later lifecycle phase."""
        if phase <= self.current_phase:
            raise PhaseRegression(
                f"cannot move from {self.current_phase.value} to {phase.value}; "
                "phases only advance"
            )
        self.current_phase = phase
        self._log(actor, f"advance phase to {phase.value}", timestamp)
        return self

    # --- queries ------------------------------------------------------------

    def open_uncertainties(
        self, phase_filter: Optional[LifecyclePhase] = None
    ) -> list[CausalPath]:
        """Plausible paths, oldest creation phase first, then by id.

        With ``phase_filter``, only paths created at or before that phase.
        """
        out = [p for p in self.paths.values() if p.classification is Classification.PLAUSIBLE]
        if phase_filter is not None:
            out = [p for p in out if p.created_phase <= phase_filter]
        out.sort(key=lambda p: (p.created_phase.rank, p.id))
        return out

    def path_history(self, path_id: str) -> list[EvidenceEntry]:
        """Full evidence history of a path, oldest first."""
        return list(self.get_path(path_id).evidence)

    def macro_relations(self) -> list[tuple[str, str]]:
        """Distinct (source object, target object) pairs joined by any path.

        Derived, never stored: the macro link between two objects exists
        exactly when at least one micro-level path joins them.
        """
        pairs = {(p.source.object, p.target.object) for p in self.paths.values()}
        return sorted(pairs)

    def paths_between(self, source_object: str, target_object: str) -> list[CausalPath]:
        return [
            p
            for p in self.paths.values()
            if p.source.object == source_object and p.target.object == target_object
        ]
