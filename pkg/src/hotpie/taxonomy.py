"""Reference catalog of causal factors and causal-path keywords.

The factor structure is fixed: six primary causal factors (Human,
Organisation, Technology, Process, Information, Environment) each divided
into two or three secondary factors, 15 in total. The keyword templates that
hang off the secondary factors are data, not code: they ship as a versioned
JSON document (``data/catalog.json``) so users can extend the reference for
their own domain, and every catalog (bundled or user-supplied) passes the
same validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import DuplicateTemplate, EmptySecondary, MalformedCatalog, UnknownFactor


class PrimaryFactor(Enum):
    """The six causal-factor vertices drawn on every object's hexagon."""

    HUMAN = "Human"
    ORGANISATION = "Organisation"
    TECHNOLOGY = "Technology"
    PROCESS = "Process"
    INFORMATION = "Information"
    ENVIRONMENT = "Environment"

    @property
    def letter(self) -> str:
        return self.value[0]

    @classmethod
    def parse(cls, text: str) -> "PrimaryFactor":
        """Accept a full name ('Human') or the single-letter code ('H')."""
        t = text.strip()
        for f in cls:
            if t.lower() == f.value.lower() or t.upper() == f.letter:
                return f
        raise UnknownFactor(f"unknown primary factor: {text!r}")


# Fixed enumeration order used everywhere output must be deterministic.
FACTOR_ORDER: tuple[PrimaryFactor, ...] = tuple(PrimaryFactor)


@dataclass(frozen=True)
class SecondaryFactor:
    id: str
    name: str
    parent: PrimaryFactor


_SECONDARY_SPEC = [
    ("H1", "Manpower", PrimaryFactor.HUMAN),
    ("H2", "Mental state", PrimaryFactor.HUMAN),
    ("H3", "Action", PrimaryFactor.HUMAN),
    ("O1", "Management", PrimaryFactor.ORGANISATION),
    ("O2", "Policy", PrimaryFactor.ORGANISATION),
    ("O3", "Resource", PrimaryFactor.ORGANISATION),
    ("T1", "Machine", PrimaryFactor.TECHNOLOGY),
    ("T2", "Property", PrimaryFactor.TECHNOLOGY),
    ("T3", "Support", PrimaryFactor.TECHNOLOGY),
    ("P1", "Nature", PrimaryFactor.PROCESS),
    ("P2", "Phase", PrimaryFactor.PROCESS),
    ("I1", "Knowledge", PrimaryFactor.INFORMATION),
    ("I2", "Error", PrimaryFactor.INFORMATION),
    ("E1", "Physical", PrimaryFactor.ENVIRONMENT),
    ("E2", "Non-physical", PrimaryFactor.ENVIRONMENT),
]

SECONDARY_FACTORS: dict[str, SecondaryFactor] = {
    sid: SecondaryFactor(sid, name, parent) for sid, name, parent in _SECONDARY_SPEC
}


def secondary_factor(factor_id: str) -> SecondaryFactor:
    """Resolve a secondary factor id, raising UnknownFactor for anything else."""
    try:
        return SECONDARY_FACTORS[factor_id]
    except KeyError:
        raise UnknownFactor(f"unknown secondary factor: {factor_id!r}") from None


def secondaries_of(primary: PrimaryFactor) -> list[SecondaryFactor]:
    return [s for s in SECONDARY_FACTORS.values() if s.parent is primary]


@dataclass(frozen=True)
class PathTemplate:
    """One keyword of the reference: a template for a plausible causal path."""

    keyword: str
    secondary: str
    citations: tuple[int, ...] = ()

    @property
    def primary(self) -> PrimaryFactor:
        return SECONDARY_FACTORS[self.secondary].parent


@dataclass(frozen=True)
class ReferenceCatalog:
    """A validated, immutable catalog of path templates.

    Safe to share across threads; all lookups are read-only.
    """

    version: str
    provenance: str
    templates: tuple[PathTemplate, ...]
    _by_secondary: dict[str, tuple[PathTemplate, ...]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        grouped: dict[str, list[PathTemplate]] = {sid: [] for sid in SECONDARY_FACTORS}
        for t in self.templates:
            grouped[t.secondary].append(t)
        for sid, group in grouped.items():
            group.sort(key=lambda t: t.keyword)
            self._by_secondary[sid] = tuple(group)

    def templates_for_secondary(self, factor_id: str) -> tuple[PathTemplate, ...]:
        secondary_factor(factor_id)
        return self._by_secondary[factor_id]


CatalogSource = Union[str, Path, IO[str]]


def load_catalog(source: CatalogSource) -> ReferenceCatalog:
    """Load and validate a catalog document.

    ``source`` may be a filesystem path or an open text stream. The document
    must be the JSON catalog format: ``{version, provenance, factors,
    templates}``. Raises MalformedCatalog for syntax or shape problems,
    UnknownFactor / DuplicateTemplate / EmptySecondary for invariant
    violations.
    """
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise MalformedCatalog(f"cannot read catalog: {exc}") from exc
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedCatalog(f"catalog is not valid JSON: {exc}") from exc
    return parse_catalog(doc)


def parse_catalog(doc: object) -> ReferenceCatalog:
    """Validate an already-decoded catalog document."""
    if not isinstance(doc, dict):
        raise MalformedCatalog("catalog root must be a JSON object")
    for key in ("version", "provenance", "factors", "templates"):
        if key not in doc:
            raise MalformedCatalog(f"catalog is missing the {key!r} field")
    if not isinstance(doc["templates"], list) or not isinstance(doc["factors"], list):
        raise MalformedCatalog("'factors' and 'templates' must be lists")

    for entry in doc["factors"]:
        if not isinstance(entry, dict) or not {"id", "name", "parent"} <= entry.keys():
            raise MalformedCatalog(f"bad factor entry: {entry!r}")
        known = SECONDARY_FACTORS.get(entry["id"])
        if known is None:
            raise UnknownFactor(f"factor {entry['id']!r} is not one of the fixed 15")
        if entry["parent"] != known.parent.value:
            raise UnknownFactor(
                f"factor {entry['id']} declared under {entry['parent']!r}, "
                f"expected {known.parent.value!r}"
            )

    templates: list[PathTemplate] = []
    seen: set[tuple[str, str]] = set()
    for entry in doc["templates"]:
        if not isinstance(entry, dict) or "keyword" not in entry or "secondary" not in entry:
            raise MalformedCatalog(f"bad template entry: {entry!r}")
        keyword = str(entry["keyword"]).strip().lower()
        if not keyword:
            raise MalformedCatalog("template keyword must be non-empty")
        sid = entry["secondary"]
        if sid not in SECONDARY_FACTORS:
            raise UnknownFactor(f"template {keyword!r} references unknown factor {sid!r}")
        citations = entry.get("citations", [])
        if not isinstance(citations, list) or not all(isinstance(c, int) for c in citations):
            raise MalformedCatalog(f"citations of {keyword!r} must be a list of integers")
        key = (keyword, sid)
        if key in seen:
            raise DuplicateTemplate(f"duplicate template {keyword!r} under {sid}")
        seen.add(key)
        templates.append(PathTemplate(keyword, sid, tuple(citations)))

    for sid in SECONDARY_FACTORS:
        if not any(t.secondary == sid for t in templates):
            raise EmptySecondary(f"secondary factor {sid} has no templates")

    return ReferenceCatalog(
        version=str(doc["version"]),
        provenance=str(doc["provenance"]),
        templates=tuple(templates),
    )


def load_default_catalog() -> ReferenceCatalog:
    """Load the catalog bundled with the package."""
    with resources.files("hotpie.data").joinpath("catalog.json").open("r", encoding="utf-8") as fh:
        return load_catalog(fh)


def lookup_templates(
    catalog: ReferenceCatalog, factor: Union[PrimaryFactor, str]
) -> list[PathTemplate]:
    """All templates under a factor, sorted by (secondary id, keyword).

    A primary factor yields the union over its secondaries; a secondary id
    (e.g. ``"H1"``) yields just that group. The order is a total order, so
    repeated calls return identical sequences.
    """
    if isinstance(factor, PrimaryFactor):
        sids = sorted(s.id for s in secondaries_of(factor))
    else:
        sids = [secondary_factor(factor).id]
    out: list[PathTemplate] = []
    for sid in sids:
        out.extend(catalog.templates_for_secondary(sid))
    return out


def search_keywords(catalog: ReferenceCatalog, query: str) -> list[PathTemplate]:
    """Case-insensitive substring search over keywords.

    An empty query matches nothing. Results are ordered as in
    lookup_templates.
    """
    q = query.strip().lower()
    if not q:
        return []
    hits = [t for t in catalog.templates if q in t.keyword]
    hits.sort(key=lambda t: (t.secondary, t.keyword))
    return hits


def keywords_for_primary(catalog: ReferenceCatalog, primary: PrimaryFactor) -> list[str]:
    """Keyword strings for one primary factor, in lookup order."""
    return [t.keyword for t in lookup_templates(catalog, primary)]


def validate_path_keywords(catalog: ReferenceCatalog, keywords: Iterable[str]) -> list[str]:
    """Return the keywords that do NOT appear in the catalog.

    Used for warn-only validation when recording causal paths: a keyword off
    the reference is allowed (the reference is a guide, not a gate), but the
    caller may want to surface it.
    """
    known = {t.keyword for t in catalog.templates}
    return [k for k in keywords if k.strip().lower() not in known]
