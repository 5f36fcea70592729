"""Coverage and uncertainty analysis over projects and architectural views.

Everything here is a pure function over immutable snapshots: suggestion
prompts that enumerate the unexplored factor pairs between two objects, the
per-view coverage of causal factors with a merge across views, gap reports
against a representation threshold, and the stale-uncertainty report that
lists plausible paths left untouched across phase advances.

Suggestion granularity is the 6x6 grid of ordered primary-factor pairs (36
prompts per object pair): a workshop can walk that list, while the secondary
factors and keywords ride along inside each prompt as drill-down content.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Optional, Sequence, Union

from .errors import DuplicateViewId, MalformedProfiles, SelfLoop
from .model import Classification, LifecyclePhase, Project
from .taxonomy import FACTOR_ORDER, PrimaryFactor, ReferenceCatalog, keywords_for_primary


class RepresentationLevel(Enum):
    """How well an architectural view can express a causal factor."""

    NOT_REPRESENTED = "NotRepresented"
    PARTIALLY_REPRESENTED = "PartiallyRepresented"
    REPRESENTED = "Represented"

    @property
    def rank(self) -> int:
        return _LEVEL_RANK[self]

    @property
    def short(self) -> str:
        return {"NotRepresented": "N", "PartiallyRepresented": "P", "Represented": "R"}[self.value]

    @classmethod
    def from_short(cls, code: str) -> "RepresentationLevel":
        try:
            return {"N": cls.NOT_REPRESENTED, "P": cls.PARTIALLY_REPRESENTED, "R": cls.REPRESENTED}[
                code.strip().upper()
            ]
        except KeyError:
            raise MalformedProfiles(f"unknown representation code {code!r}") from None

    def __lt__(self, other: "RepresentationLevel") -> bool:
        return self.rank < other.rank

    def __le__(self, other: "RepresentationLevel") -> bool:
        return self.rank <= other.rank

    def __gt__(self, other: "RepresentationLevel") -> bool:
        return self.rank > other.rank

    def __ge__(self, other: "RepresentationLevel") -> bool:
        return self.rank >= other.rank


_LEVEL_RANK = {level: i for i, level in enumerate(RepresentationLevel)}


class ViewCategory(Enum):
    TABULAR = "Tabular"
    STRUCTURAL = "Structural"
    BEHAVIOURAL = "Behavioural"
    MAPPING = "Mapping"
    ONTOLOGY = "Ontology"
    PICTORIAL = "Pictorial"
    TIMELINE = "Timeline"


@dataclass(frozen=True)
class ViewProfile:
    """One architectural view's ability to represent each causal factor."""

    view_id: str
    title: str
    category: ViewCategory
    levels: dict[PrimaryFactor, RepresentationLevel]
    notes: dict[PrimaryFactor, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        missing = [f.value for f in FACTOR_ORDER if f not in self.levels]
        if missing:
            raise MalformedProfiles(f"view {self.view_id}: no level for {', '.join(missing)}")


@dataclass(frozen=True)
class CoverageMatrix:
    rows: tuple[ViewProfile, ...]
    merged: dict[PrimaryFactor, RepresentationLevel]


@dataclass(frozen=True)
class SuggestionPrompt:
    """One unexplored (or explored) factor pair between two objects."""

    source_object: str
    target_object: str
    source_factor: PrimaryFactor
    target_factor: PrimaryFactor
    templates: tuple[str, ...]
    covered: bool


def suggest_paths(
    project: Project,
    catalog: ReferenceCatalog,
    source_object: str,
    target_object: str,
    include_covered: bool = False,
) -> list[SuggestionPrompt]:
    """Enumerate the 36 ordered factor pairs between two distinct objects.

    A pair is covered when an existing path between these objects (in this
    direction) already uses it. Each prompt carries the catalog keywords of
    its source factor. Order is source-major in the fixed factor order
    (H, O, T, P, I, E), so output is deterministic.
    """
    project.get_object(source_object)
    project.get_object(target_object)
    if source_object == target_object:
        raise SelfLoop("suggestions need two distinct objects")

    used = {
        (p.source.primary, p.target.primary)
        for p in project.paths_between(source_object, target_object)
    }
    keyword_cache = {f: tuple(keywords_for_primary(catalog, f)) for f in FACTOR_ORDER}
    prompts = []
    for sf in FACTOR_ORDER:
        for tf in FACTOR_ORDER:
            covered = (sf, tf) in used
            if covered and not include_covered:
                continue
            prompts.append(
                SuggestionPrompt(
                    source_object=source_object,
                    target_object=target_object,
                    source_factor=sf,
                    target_factor=tf,
                    templates=keyword_cache[sf],
                    covered=covered,
                )
            )
    return prompts


def merge_coverage(profiles: Sequence[ViewProfile]) -> CoverageMatrix:
    """Merge view profiles factor-by-factor, taking the best level.

    The merge of no profiles is all-NotRepresented.
    """
    seen: set[str] = set()
    for p in profiles:
        if p.view_id in seen:
            raise DuplicateViewId(f"view {p.view_id!r} appears more than once")
        seen.add(p.view_id)
    merged = {
        f: max(
            (p.levels[f] for p in profiles),
            key=lambda level: level.rank,
            default=RepresentationLevel.NOT_REPRESENTED,
        )
        for f in FACTOR_ORDER
    }
    return CoverageMatrix(rows=tuple(profiles), merged=merged)


def gap_report(
    profiles: Sequence[ViewProfile],
    threshold: RepresentationLevel = RepresentationLevel.REPRESENTED,
) -> list[tuple[PrimaryFactor, RepresentationLevel]]:
    """Factors whose merged level falls strictly below the threshold.

    Results come back in the fixed factor order.
    """
    merged = merge_coverage(profiles).merged
    return [(f, merged[f]) for f in FACTOR_ORDER if merged[f] < threshold]


def factor_usage(project: Project) -> dict[str, dict[PrimaryFactor, int]]:
    """Per object, how many path endpoints touch each factor vertex.

    Zero-count factors are the object's unexplored vertices, so every object
    gets a full six-factor map.
    """
    usage: dict[str, dict[PrimaryFactor, int]] = {
        oid: {f: 0 for f in FACTOR_ORDER} for oid in project.objects
    }
    for path in project.paths.values():
        usage[path.source.object][path.source.primary] += 1
        usage[path.target.object][path.target.primary] += 1
    return usage


def stale_report(project: Project, as_of_phase: LifecyclePhase) -> list:
    """Plausible paths with no information since before ``as_of_phase``.

    A path is stale when its latest evidence phase (or its creation phase if
    it has none) is strictly earlier than ``as_of_phase``: the uncertainty
    survived a phase advance without anyone adding information. Oldest phase
    first, then id.
    """
    stale = [
        p
        for p in project.paths.values()
        if p.classification is Classification.PLAUSIBLE and p.latest_phase < as_of_phase
    ]
    stale.sort(key=lambda p: (p.latest_phase.rank, p.id))
    return stale


# --- view-profile documents -------------------------------------------------

ProfilesSource = Union[str, Path, IO[str]]


def load_profiles(source: ProfilesSource) -> list[ViewProfile]:
    """Load a JSON list of view profiles.

    Format: ``[{view_id, title, category, levels: {Human: "R"|"P"|"N", ...},
    notes: {Human: "...", ...}}, ...]``.
    """
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise MalformedProfiles(f"cannot read profiles: {exc}") from exc
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedProfiles(f"profiles document is not valid JSON: {exc}") from exc
    return parse_profiles(doc)


def parse_profiles(doc: object) -> list[ViewProfile]:
    if not isinstance(doc, list):
        raise MalformedProfiles("profiles document must be a JSON list")
    profiles = []
    for entry in doc:
        if not isinstance(entry, dict) or not {"view_id", "title", "category", "levels"} <= entry.keys():
            raise MalformedProfiles(f"bad profile entry: {entry!r}")
        try:
            category = ViewCategory(entry["category"])
        except ValueError:
            raise MalformedProfiles(f"unknown view category {entry['category']!r}") from None
        levels_doc = entry["levels"]
        if not isinstance(levels_doc, dict):
            raise MalformedProfiles(f"view {entry['view_id']}: 'levels' must be an object")
        levels = {
            PrimaryFactor.parse(name): RepresentationLevel.from_short(code)
            for name, code in levels_doc.items()
        }
        notes = {
            PrimaryFactor.parse(name): str(note)
            for name, note in entry.get("notes", {}).items()
        }
        profiles.append(
            ViewProfile(
                view_id=str(entry["view_id"]),
                title=str(entry["title"]),
                category=category,
                levels=levels,
                notes=notes,
            )
        )
    return profiles


def load_default_profiles() -> list[ViewProfile]:
    """The bundled MoDAF operational and system view profiles."""
    with resources.files("hotpie.data").joinpath("modaf_profiles.json").open(
        "r", encoding="utf-8"
    ) as fh:
        return load_profiles(fh)


def select_views(profiles: Sequence[ViewProfile], view_ids: Sequence[str]) -> list[ViewProfile]:
    """Subset profiles by id, preserving input order; unknown ids error."""
    by_id = {p.view_id: p for p in profiles}
    missing = [v for v in view_ids if v not in by_id]
    if missing:
        raise MalformedProfiles(f"unknown view id(s): {', '.join(missing)}")
    return [by_id[v] for v in view_ids]
