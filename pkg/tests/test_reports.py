from __future__ import annotations

import csv
import io
import re

from hotpie.analysis import load_default_profiles, merge_coverage
from hotpie.model import Classification, LifecyclePhase, Project
from hotpie.reports import coverage_csv, export_dot, render_report


def _dot_counts(dot: str) -> tuple[int, int]:
    nodes = re.findall(r'^\s+"[^"]+" \[label=', dot, flags=re.M)
    edges = re.findall(r'^\s+"[^"]+":[HOTPIE] -> "[^"]+":[HOTPIE] \[', dot, flags=re.M)
    return len(nodes), len(edges)


def test_dot_example_shape(arp):
    dot = export_dot(arp)
    nodes, edges = _dot_counts(dot)
    assert nodes == 5
    assert edges == 3
    assert '"ground-crew":O -> "runway":P [label="inadequate training", style=dashed];' in dot
    assert dot.count("{<H>H|<O>O|<T>T|<P>P|<I>I|<E>E}") == 5
    assert dot.strip().startswith("digraph")
    assert dot.count("{") == dot.count("}")


def test_dot_empty_project():
    dot = export_dot(Project.create("empty"))
    nodes, edges = _dot_counts(dot)
    assert (nodes, edges) == (0, 0)
    assert dot.strip().startswith("digraph")
    assert dot.strip().endswith("}")


def test_dot_deterministic(arp):
    assert export_dot(arp) == export_dot(arp)


def test_dot_discharged_hidden_unless_asked(arp):
    arp.record_evidence("CP3", "resolved", "a", Classification.DISCHARGED)
    assert _dot_counts(export_dot(arp))[1] == 2
    shown = export_dot(arp, show_discharged=True)
    assert _dot_counts(shown)[1] == 3
    assert "style=dotted" in shown


def test_dot_escapes_names():
    project = Project.create("esc")
    project.add_object('pump "A" {left|right}', object_id="p1")
    project.add_object("tank", object_id="t2")
    dot = export_dot(project)
    assert _dot_counts(dot)[0] == 2
    assert "\\{left\\|right\\}" in dot


def test_coverage_csv_shape(modaf):
    text = coverage_csv(merge_coverage(modaf))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == [
        "view_id", "title",
        "Human", "Organisation", "Technology", "Process", "Information", "Environment",
    ]
    assert len(rows) == 12  # header + ten views + merged
    assert rows[-1][0] == "MERGED"
    assert rows[-1][2:] == ["P", "R", "R", "R", "R", "P"]
    sv1 = next(r for r in rows if r[0] == "SV-1")
    assert sv1[2:] == ["P", "R", "R", "P", "R", "N"]


def test_report_example_with_profiles(arp, modaf):
    sv4 = [p for p in modaf if p.view_id == "SV-4"]
    md = render_report(arp, sv4)
    gaps_section = md.split("### Coverage gaps")[1]
    assert "- Human:" in gaps_section
    assert "- Organisation:" in gaps_section
    assert "- Environment:" in gaps_section
    assert "## Hazard feed" in md
    assert "| CP1 |" in md
    assert "| CP2 |" in md
    assert "| CP3 |" in md.split("## Open uncertainties")[1].split("##")[0]


def test_report_empty_project():
    md = render_report(Project.create("blank slate"))
    assert "Objects: 0" in md
    assert "Causal paths: 0" in md
    assert "No open uncertainties." in md
    assert "|" not in md.split("## Factor usage")[1].split("##")[0]


def test_report_after_discharge_keeps_history(arp):
    arp.record_evidence("CP3", "programme subscription confirmed", "analyst",
                        Classification.DISCHARGED)
    md = render_report(arp)
    open_section = md.split("## Open uncertainties")[1].split("##")[0]
    assert "CP3" not in open_section
    history = md.split("## Path histories")[1]
    assert "programme subscription confirmed" in history
    assert "CP3" in history


def test_report_marks_stale_and_unknown_authors(arp):
    arp.advance_phase(LifecyclePhase.VALIDATION)
    arp.record_evidence("CP1", "anonymous note", "unknown", Classification.DEFINITE)
    md = render_report(arp)
    open_section = md.split("## Open uncertainties")[1].split("##")[0]
    assert "CP3 (stale)" in open_section
    assert "unknown (unattributed)" in md


def test_report_flags_definite_discharge(arp):
    arp.record_evidence("CP1", "redesigned away", "analyst", Classification.DISCHARGED)
    md = render_report(arp)
    assert "once Definite" in md


def test_full_default_profiles_render(arp):
    md = render_report(arp, load_default_profiles())
    gaps_section = md.split("### Coverage gaps")[1]
    assert "- Human: PartiallyRepresented" in gaps_section
    assert "- Environment: PartiallyRepresented" in gaps_section
    assert "Organisation" not in gaps_section
