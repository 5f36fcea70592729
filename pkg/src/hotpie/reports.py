"""Diagram and report emission.

The DOT export encodes each object's factor hexagon as a six-port record
node (ports H, O, T, P, I, E in fixed order), with one edge per causal path
from source port to target port. DOT cannot draw a literal labeled hexagon
portably, so the ports carry the same information: which factor vertex an
edge touches. Edge style tracks classification: Definite solid, Plausible
dashed, Discharged dotted (hidden unless asked for).

All output here is deterministic given the project snapshot.
"""

from __future__ import annotations

import csv
import io
from typing import Optional, Sequence

from .analysis import (
    CoverageMatrix,
    ViewProfile,
    factor_usage,
    gap_report,
    merge_coverage,
    stale_report,
)
from .model import CausalPath, Classification, Project
from .taxonomy import FACTOR_ORDER

_PORTS = "".join(f"<{f.letter}>{f.letter}|" for f in FACTOR_ORDER).rstrip("|")

_EDGE_STYLE = {
    Classification.DEFINITE: "solid",
    Classification.PLAUSIBLE: "dashed",
    Classification.DISCHARGED: "dotted",
}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _record_escape(text: str) -> str:
    text = text.replace("\\", "\\\\")
    for ch in "{}|<>":
        text = text.replace(ch, "\\" + ch)
    return text.replace('"', '\\"')


def export_dot(project: Project, show_discharged: bool = False) -> str:
    """Render a project as a DOT graph with six-port record nodes."""
    lines = [
        "digraph causal_paths {",
        "  rankdir=LR;",
        '  node [shape=record, fontname="Helvetica"];',
    ]
    for obj in project.objects.values():
        # the braces of the record structure itself must stay unescaped, so
        # the label is quoted directly rather than via _quote
        label = f"{{{_record_escape(obj.name)}|{{{_PORTS}}}}}"
        lines.append(f'  {_quote(obj.id)} [label="{label}"];')
    for path in project.paths.values():
        if path.classification is Classification.DISCHARGED and not show_discharged:
            continue
        label = ", ".join(path.keywords)
        lines.append(
            f"  {_quote(path.source.object)}:{path.source.primary.letter}"
            f" -> {_quote(path.target.object)}:{path.target.primary.letter}"
            f" [label={_quote(label)}, style={_EDGE_STYLE[path.classification]}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def coverage_csv(matrix: CoverageMatrix) -> str:
    """Coverage matrix as CSV: one row per view plus a final MERGED row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["view_id", "title"] + [f.value for f in FACTOR_ORDER])
    for row in matrix.rows:
        writer.writerow([row.view_id, row.title] + [row.levels[f].short for f in FACTOR_ORDER])
    writer.writerow(["MERGED", ""] + [matrix.merged[f].short for f in FACTOR_ORDER])
    return buf.getvalue()


def _endpoint_label(project: Project, path: CausalPath, which: str) -> str:
    e = path.source if which == "source" else path.target
    factor = e.primary.value if e.secondary is None else f"{e.primary.value}/{e.secondary}"
    return f"{project.objects[e.object].name} ({factor})"


def _path_row(project: Project, path: CausalPath, marker: str = "") -> str:
    keywords = ", ".join(path.keywords) or "-"
    return (
        f"| {path.id}{marker} | {_endpoint_label(project, path, 'source')} | "
        f"{_endpoint_label(project, path, 'target')} | {keywords} | "
        f"{path.created_phase.value} |"
    )


_PATH_TABLE_HEADER = [
    "| Path | From | To | Keywords | Since |",
    "| --- | --- | --- | --- | --- |",
]


def render_report(project: Project, profiles: Optional[Sequence[ViewProfile]] = None) -> str:
    """Markdown session report for one project snapshot.

    Sections: summary counts, the Definite hazard feed, open uncertainties
    (stale ones marked inline rather than repeated), factor usage per object,
    coverage and gaps when view profiles are supplied, and a per-path
    evidence appendix so discharged history stays visible.
    """
    by_class = {c: [p for p in project.paths.values() if p.classification is c] for c in Classification}
    stale = stale_report(project, project.current_phase)
    stale_ids = {p.id for p in stale}

    out: list[str] = [f"# {project.name}", ""]
    out += [
        f"- Phase: {project.current_phase.value}",
        f"- Objects: {len(project.objects)}",
        f"- Causal paths: {len(project.paths)} "
        f"(Definite {len(by_class[Classification.DEFINITE])}, "
        f"Plausible {len(by_class[Classification.PLAUSIBLE])}, "
        f"Discharged {len(by_class[Classification.DISCHARGED])})",
        "",
    ]

    out += ["## Hazard feed (Definite)", ""]
    definite = sorted(by_class[Classification.DEFINITE], key=lambda p: p.id)
    if definite:
        out += _PATH_TABLE_HEADER
        out += [_path_row(project, p) for p in definite]
    else:
        out.append("No definite safety-critical paths recorded.")
    out.append("")

    out += ["## Open uncertainties (Plausible)", ""]
    open_paths = project.open_uncertainties()
    if open_paths:
        out += _PATH_TABLE_HEADER
        out += [_path_row(project, p, " (stale)" if p.id in stale_ids else "") for p in open_paths]
        if stale_ids:
            out.append("")
            out.append(
                f"{len(stale_ids)} of {len(open_paths)} received no new information "
                f"since before the current phase."
            )
    else:
        out.append("No open uncertainties.")
    out.append("")

    out += ["## Factor usage", ""]
    usage = factor_usage(project)
    if usage:
        out.append("| Object | " + " | ".join(f.letter for f in FACTOR_ORDER) + " |")
        out.append("| --- |" + " --- |" * len(FACTOR_ORDER))
        for oid, counts in usage.items():
            cells = " | ".join(str(counts[f]) for f in FACTOR_ORDER)
            out.append(f"| {project.objects[oid].name} | {cells} |")
    else:
        out.append("No objects recorded.")
    out.append("")

    if profiles is not None:
        matrix = merge_coverage(profiles)
        out += ["## View coverage", ""]
        out.append("| View | " + " | ".join(f.letter for f in FACTOR_ORDER) + " |")
        out.append("| --- |" + " --- |" * len(FACTOR_ORDER))
        for row in matrix.rows:
            cells = " | ".join(row.levels[f].short for f in FACTOR_ORDER)
            out.append(f"| {row.view_id} | {cells} |")
        merged_cells = " | ".join(matrix.merged[f].short for f in FACTOR_ORDER)
        out.append(f"| **merged** | {merged_cells} |")
        out.append("")
        gaps = gap_report(profiles)
        out += ["### Coverage gaps", ""]
        if gaps:
            for factor, level in gaps:
                out.append(f"- {factor.value}: {level.value}")
        else:
            out.append("All factors fully represented.")
        out.append("")

    out += ["## Path histories", ""]
    if not project.paths:
        out.append("No causal paths recorded.")
    for path in project.paths.values():
        out.append(f"### {path.id} [{path.classification.value}]")
        out.append("")
        if path.narrative:
            out.append(path.narrative)
            out.append("")
        if path.classification is Classification.DISCHARGED and path.was_ever_definite():
            out.append("> Review: this path was once Definite and is now Discharged.")
            out.append("")
        if path.evidence:
            for e in path.evidence:
                author = e.author if e.author != "unknown" else "unknown (unattributed)"
                out.append(
                    f"- {e.timestamp:%Y-%m-%d %H:%M} UTC, {e.phase.value}, {author}: "
                    f"{e.text} -> {e.resulting_classification.value}"
                )
        else:
            out.append(f"- No evidence recorded since creation ({path.created_phase.value}).")
        out.append("")

    return "\n".join(out).rstrip() + "\n"
