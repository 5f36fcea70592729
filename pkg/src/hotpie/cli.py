"""Command-line front end.

Every mutating subcommand is a thin wrapper over exactly one library
operation: load the project file (under an advisory lock), apply the
operation, save. Read-only subcommands are pure views. Exit codes: 0 on
success, 1 on a domain error (printed as ``error[Code]: message``), 2 on
usage errors.
"""

from __future__ import annotations

import contextlib
import fcntl
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import click

from . import analysis, reports, stpa, storage, taxonomy
from .errors import HotpieError
from .model import Abstraction, CausalEndpoint, Classification, LifecyclePhase, Project
from .taxonomy import PrimaryFactor


@dataclass
class CliConfig:
    project_path: Optional[Path]
    catalog_path: Optional[Path]
    profiles_path: Optional[Path]
    output_format: str
    author: str

    def catalog(self) -> taxonomy.ReferenceCatalog:
        if self.catalog_path is not None:
            return taxonomy.load_catalog(self.catalog_path)
        return taxonomy.load_default_catalog()

    def profiles(self) -> list[analysis.ViewProfile]:
        if self.profiles_path is not None:
            return analysis.load_profiles(self.profiles_path)
        return analysis.load_default_profiles()

    def require_project_path(self) -> Path:
        if self.project_path is None:
            raise click.UsageError("--project is required for this command")
        return self.project_path

    def load_project(self) -> Project:
        return storage.load_project_file(self.require_project_path())


@contextlib.contextmanager
def _project_lock(path: Path):
    """Advisory write lock so concurrent CLI mutations do not interleave."""
    lock_path = path.with_suffix(path.suffix + ".lock")
    with open(lock_path, "w") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


@contextlib.contextmanager
def _mutate(config: CliConfig):
    path = config.require_project_path()
    with _project_lock(path):
        project = storage.load_project_file(path)
        yield project
        storage.save_project_file(project, path)


def _emit(config: CliConfig, payload, text_lines: Sequence[str]) -> None:
    if config.output_format == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            click.echo(line)


def parse_endpoint(spec: str) -> CausalEndpoint:
    """Parse 'object:Primary[:Secondary]', e.g. 'aircrew:Human:H2' or 'runway:P'."""
    parts = spec.split(":")
    if len(parts) not in (2, 3) or not parts[0]:
        raise click.UsageError(
            f"bad endpoint {spec!r}; expected OBJECT:FACTOR or OBJECT:FACTOR:SECONDARY"
        )
    primary = PrimaryFactor.parse(parts[1])
    secondary = parts[2] if len(parts) == 3 else None
    return CausalEndpoint(object=parts[0], primary=primary, secondary=secondary)


def _phase(value: Optional[str]) -> Optional[LifecyclePhase]:
    if value is None:
        return None
    try:
        return LifecyclePhase(value.capitalize())
    except ValueError:
        raise click.UsageError(
            f"unknown phase {value!r}; one of " + ", ".join(p.value for p in LifecyclePhase)
        ) from None


def _classification(value: str) -> Classification:
    try:
        return Classification(value.capitalize())
    except ValueError:
        raise click.UsageError(f"unknown classification {value!r}") from None


@click.group()
@click.option("--project", "project_path", type=click.Path(path_type=Path), default=None,
              help="Project file to operate on.")
@click.option("--catalog", "catalog_path", type=click.Path(path_type=Path), default=None,
              help="Catalog file (defaults to the bundled reference).")
@click.option("--profiles", "profiles_path", type=click.Path(path_type=Path), default=None,
              help="View-profiles file (defaults to the bundled MoDAF profiles).")
@click.option("--format", "output_format", type=click.Choice(["text", "json"]), default="text",
              help="Output format for read commands.")
@click.option("--author", envvar="HOTPIE_AUTHOR", default="unknown",
              help="Actor recorded in the audit log (env: HOTPIE_AUTHOR).")
@click.pass_context
def main(ctx, project_path, catalog_path, profiles_path, output_format, author):
    """Capture and track causal-path uncertainty during hazard analysis."""
    ctx.obj = CliConfig(project_path, catalog_path, profiles_path, output_format, author)


@main.command()
@click.argument("name", required=False)
@click.option("--id", "project_id", default=None, help="Explicit project id.")
@click.option("--example", is_flag=True, help="Write the bundled aircraft example instead.")
@click.pass_obj
def init(config: CliConfig, name, project_id, example):
    """Create a new project file."""
    path = config.require_project_path()
    if path.exists():
        raise click.UsageError(f"{path} already exists")
    if example:
        project = storage.load_example_project()
    else:
        if not name:
            raise click.UsageError("NAME is required unless --example is given")
        project = Project.create(name, project_id, actor=config.author)
    storage.save_project_file(project, path)
    _emit(config, {"id": project.id}, [project.id])


# --- objects ----------------------------------------------------------------

@main.group("object")
def object_group():
    """Manage system objects."""


@object_group.command("add")
@click.argument("name")
@click.option("--description", default="")
@click.option("--abstraction", type=click.Choice(["Macro", "Micro"]), default="Macro")
@click.option("--tag", "tags", multiple=True)
@click.option("--id", "object_id", default=None)
@click.pass_obj
def object_add(config: CliConfig, name, description, abstraction, tags, object_id):
    """Add a system object."""
    with _mutate(config) as project:
        oid = project.add_object(
            name,
            description=description,
            abstraction=Abstraction(abstraction),
            tags=tags,
            object_id=object_id,
            actor=config.author,
        )
    _emit(config, {"id": oid}, [oid])


@object_group.command("ls")
@click.pass_obj
def object_ls(config: CliConfig):
    """List objects."""
    project = config.load_project()
    docs = [
        {"id": o.id, "name": o.name, "abstraction": o.abstraction.value, "tags": list(o.tags)}
        for o in project.objects.values()
    ]
    _emit(config, docs, [f"{o.id}\t{o.name}" for o in project.objects.values()])


# --- paths -------------------------------------------------------------------

@main.group("path")
def path_group():
    """Manage causal paths."""


@path_group.command("add")
@click.option("--source", required=True, help="OBJECT:FACTOR[:SECONDARY]")
@click.option("--target", required=True, help="OBJECT:FACTOR[:SECONDARY]")
@click.option("--keyword", "keywords", multiple=True)
@click.option("--narrative", default="")
@click.option("--classification", "initial", default="Plausible",
              type=click.Choice(["Definite", "Plausible"]))
@click.option("--phase", default=None)
@click.option("--id", "path_id", default=None)
@click.pass_obj
def path_add(config: CliConfig, source, target, keywords, narrative, initial, phase, path_id):
    """Record a causal path between two factor endpoints."""
    catalog = config.catalog()
    off_catalog = taxonomy.validate_path_keywords(catalog, keywords)
    with _mutate(config) as project:
        pid = project.add_path(
            source=parse_endpoint(source),
            target=parse_endpoint(target),
            keywords=keywords,
            narrative=narrative,
            initial=Classification(initial),
            phase=_phase(phase),
            path_id=path_id,
            actor=config.author,
        )
    for kw in off_catalog:
        click.echo(f"warning: keyword {kw!r} is not in the catalog", err=True)
    _emit(config, {"id": pid}, [pid])


@path_group.command("ls")
@click.option("--classification", "filter_class", default=None,
              type=click.Choice(["Definite", "Plausible", "Discharged"]))
@click.pass_obj
def path_ls(config: CliConfig, filter_class):
    """List causal paths."""
    project = config.load_project()
    paths = list(project.paths.values())
    if filter_class:
        paths = [p for p in paths if p.classification is Classification(filter_class)]
    docs = [
        {
            "id": p.id,
            "source": {"object": p.source.object, "primary": p.source.primary.value,
                       "secondary": p.source.secondary},
            "target": {"object": p.target.object, "primary": p.target.primary.value,
                       "secondary": p.target.secondary},
            "keywords": list(p.keywords),
            "classification": p.classification.value,
            "created_phase": p.created_phase.value,
            "evidence_count": len(p.evidence),
        }
        for p in paths
    ]
    lines = [
        f"{p.id}\t{p.source.object}/{p.source.primary.letter} -> "
        f"{p.target.object}/{p.target.primary.letter}\t{p.classification.value}"
        for p in paths
    ]
    _emit(config, docs, lines)


# --- evidence & phase ---------------------------------------------------------

@main.group("evidence")
def evidence_group():
    """Record evidence against causal paths."""


@evidence_group.command("add")
@click.argument("path_id")
@click.option("--text", required=True)
@click.option("--resulting", required=True,
              type=click.Choice(["Definite", "Plausible", "Discharged"]))
@click.option("--phase", default=None)
@click.pass_obj
def evidence_add(config: CliConfig, path_id, text, resulting, phase):
    """Append an evidence entry; the path takes the resulting classification."""
    with _mutate(config) as project:
        path = project.record_evidence(
            path_id,
            text=text,
            author=config.author,
            resulting=Classification(resulting),
            phase=_phase(phase),
        )
        result = {"id": path.id, "classification": path.classification.value}
    _emit(config, result, [f"{path_id} -> {result['classification']}"])


@main.group("phase")
def phase_group():
    """Lifecycle phase control."""


@phase_group.command("advance")
@click.argument("phase")
@click.pass_obj
def phase_advance(config: CliConfig, phase):
    """Advance the project to a strictly later phase."""
    target = _phase(phase)
    with _mutate(config) as project:
        project.advance_phase(target, actor=config.author)
    _emit(config, {"current_phase": target.value}, [target.value])


# --- analysis views ------------------------------------------------------------

def _prompt_doc(p: analysis.SuggestionPrompt) -> dict:
    return {
        "source_object": p.source_object,
        "target_object": p.target_object,
        "source_factor": p.source_factor.value,
        "target_factor": p.target_factor.value,
        "covered": p.covered,
        "templates": list(p.templates),
    }


def _prompt_line(p: analysis.SuggestionPrompt) -> str:
    mark = "covered" if p.covered else "open"
    preview = ", ".join(p.templates[:4])
    more = f" (+{len(p.templates) - 4} more)" if len(p.templates) > 4 else ""
    return (
        f"{p.source_factor.letter} -> {p.target_factor.letter}\t{mark}\t"
        f"keywords: {preview}{more}"
    )


@main.command()
@click.argument("source_object")
@click.argument("target_object")
@click.option("--include-covered", is_flag=True, default=False)
@click.pass_obj
def suggest(config: CliConfig, source_object, target_object, include_covered):
    """Walk the unexplored factor pairs between two objects."""
    project = config.load_project()
    prompts = analysis.suggest_paths(
        project, config.catalog(), source_object, target_object, include_covered=include_covered
    )
    _emit(config, [_prompt_doc(p) for p in prompts], [_prompt_line(p) for p in prompts])


def _selected_profiles(config: CliConfig, views: Optional[str]) -> list[analysis.ViewProfile]:
    profiles = config.profiles()
    if views:
        profiles = analysis.select_views(profiles, [v.strip() for v in views.split(",")])
    return profiles


@main.command()
@click.option("--views", default=None, help="Comma-separated view ids to include.")
@click.pass_obj
def coverage(config: CliConfig, views):
    """Coverage matrix of the selected view profiles."""
    matrix = analysis.merge_coverage(_selected_profiles(config, views))
    doc = {
        "rows": [
            {"view_id": r.view_id,
             "levels": {f.value: r.levels[f].value for f in taxonomy.FACTOR_ORDER}}
            for r in matrix.rows
        ],
        "merged": {f.value: matrix.merged[f].value for f in taxonomy.FACTOR_ORDER},
    }
    lines = [
        f"{r.view_id}\t" + " ".join(r.levels[f].short for f in taxonomy.FACTOR_ORDER)
        for r in matrix.rows
    ]
    lines.append("MERGED\t" + " ".join(matrix.merged[f].short for f in taxonomy.FACTOR_ORDER))
    _emit(config, doc, lines)


@main.command()
@click.option("--views", default=None, help="Comma-separated view ids to include.")
@click.option("--threshold", type=click.Choice(["Represented", "PartiallyRepresented"]),
              default="Represented")
@click.pass_obj
def gaps(config: CliConfig, views, threshold):
    """Factors the selected views cannot fully represent."""
    result = analysis.gap_report(
        _selected_profiles(config, views), analysis.RepresentationLevel(threshold)
    )
    doc = [{"factor": f.value, "merged_level": level.value} for f, level in result]
    _emit(config, doc, [f"{f.value}: {level.value}" for f, level in result])


@main.command()
@click.option("--as-of", "as_of", default=None,
              help="Phase to judge staleness against (default: current).")
@click.pass_obj
def stale(config: CliConfig, as_of):
    """Plausible paths with no information since before the given phase."""
    project = config.load_project()
    phase = _phase(as_of) or project.current_phase
    result = analysis.stale_report(project, phase)
    doc = [{"id": p.id, "latest_phase": p.latest_phase.value} for p in result]
    _emit(config, doc, [f"{p.id}\t{p.latest_phase.value}" for p in result])


@main.command()
@click.option("--with-coverage", is_flag=True, default=False,
              help="Include the view-coverage section.")
@click.option("--views", default=None)
@click.pass_obj
def report(config: CliConfig, with_coverage, views):
    """Render the full Markdown session report."""
    project = config.load_project()
    profiles = _selected_profiles(config, views) if (with_coverage or views) else None
    md = reports.render_report(project, profiles)
    _emit(config, {"markdown": md}, [md.rstrip("\n")])


# --- exports --------------------------------------------------------------------

@main.group("export")
def export_group():
    """Export diagrams and matrices."""


@export_group.command("dot")
@click.option("--show-discharged", is_flag=True, default=False)
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def export_dot_cmd(config: CliConfig, show_discharged, output):
    """DOT diagram of objects and causal paths."""
    text = reports.export_dot(config.load_project(), show_discharged=show_discharged)
    if output:
        output.write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@export_group.command("csv")
@click.option("--views", default=None)
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None)
@click.pass_obj
def export_csv_cmd(config: CliConfig, views, output):
    """Coverage matrix as CSV (views plus a MERGED row)."""
    matrix = analysis.merge_coverage(_selected_profiles(config, views))
    text = reports.coverage_csv(matrix)
    if output:
        output.write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


# --- stpa -------------------------------------------------------------------------

@main.group("stpa")
def stpa_group():
    """Bridge to a safety control structure."""


@stpa_group.command("import")
@click.argument("structure_file", type=click.Path(exists=True, path_type=Path))
@click.pass_obj
def stpa_import(config: CliConfig, structure_file):
    """Materialize control-structure nodes as project objects."""
    structure = stpa.import_control_structure(structure_file)
    with _mutate(config) as project:
        mapping = stpa.materialize(project, structure, actor=config.author)
    _emit(config, mapping, [f"{node}\t{obj}" for node, obj in mapping.items()])


@stpa_group.command("prompts")
@click.argument("structure_file", type=click.Path(exists=True, path_type=Path))
@click.pass_obj
def stpa_prompts(config: CliConfig, structure_file):
    """Uncovered factor prompts along each control relation."""
    structure = stpa.import_control_structure(structure_file)
    project = config.load_project()
    mapping = project.metadata.get(stpa.MAPPING_KEY, {})
    prompts = stpa.prompts_for_relations(project, config.catalog(), structure, mapping)
    lines = [
        f"{p.source_object} -> {p.target_object}\t" + _prompt_line(p) for p in prompts
    ]
    _emit(config, [_prompt_doc(p) for p in prompts], lines)


@stpa_group.command("findings")
@click.argument("structure_file", type=click.Path(exists=True, path_type=Path))
@click.pass_obj
def stpa_findings(config: CliConfig, structure_file):
    """Dispositions for in-scope paths (Definite feeds, Plausible tracks)."""
    stpa.import_control_structure(structure_file)
    project = config.load_project()
    mapping = project.metadata.get(stpa.MAPPING_KEY, {})
    findings = stpa.export_findings(project, mapping)
    doc = stpa.findings_to_json(project, findings)
    md = stpa.findings_markdown(project, findings)
    _emit(config, doc, [md.rstrip("\n")])


# --- catalog ------------------------------------------------------------------------

@main.group("catalog")
def catalog_group():
    """Inspect the causal-factor reference catalog."""


def _template_line(t: taxonomy.PathTemplate) -> str:
    cites = f" [{', '.join(map(str, t.citations))}]" if t.citations else ""
    return f"{t.secondary}\t{t.keyword}{cites}"


def _template_doc(t: taxonomy.PathTemplate) -> dict:
    return {"keyword": t.keyword, "secondary": t.secondary, "citations": list(t.citations)}


@catalog_group.command("ls")
@click.argument("factor", required=False)
@click.pass_obj
def catalog_ls(config: CliConfig, factor):
    """List templates, optionally under one factor (e.g. Human or H1)."""
    catalog = config.catalog()
    if factor is None:
        templates = [t for f in taxonomy.FACTOR_ORDER
                     for t in taxonomy.lookup_templates(catalog, f)]
    elif factor in taxonomy.SECONDARY_FACTORS:
        templates = taxonomy.lookup_templates(catalog, factor)
    else:
        templates = taxonomy.lookup_templates(catalog, PrimaryFactor.parse(factor))
    _emit(config, [_template_doc(t) for t in templates], [_template_line(t) for t in templates])


@catalog_group.command("search")
@click.argument("query")
@click.pass_obj
def catalog_search(config: CliConfig, query):
    """Case-insensitive substring search over keywords."""
    hits = taxonomy.search_keywords(config.catalog(), query)
    _emit(config, [_template_doc(t) for t in hits], [_template_line(t) for t in hits])


@catalog_group.command("export")
@click.option("-o", "--output", type=click.Path(path_type=Path), required=True)
@click.pass_obj
def catalog_export(config: CliConfig, output):
    """Write the active catalog to a file for local extension (use with --catalog)."""
    catalog = config.catalog()
    doc = {
        "version": catalog.version,
        "provenance": catalog.provenance,
        "factors": [
            {"id": s.id, "name": s.name, "parent": s.parent.value}
            for s in taxonomy.SECONDARY_FACTORS.values()
        ],
        "templates": [_template_doc(t) for t in catalog.templates],
    }
    output.write_text(
        json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    _emit(config, {"path": str(output), "templates": len(catalog.templates)},
          [f"wrote {len(catalog.templates)} templates to {output}"])


# --- service -----------------------------------------------------------------------

@main.command()
@click.option("--bind", default="127.0.0.1:8000", help="HOST:PORT to listen on.")
@click.option("--store-root", type=click.Path(path_type=Path), required=True,
              help="Directory of project files served by the API.")
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed UI origins (repeatable).")
@click.pass_obj
def serve(config: CliConfig, bind, store_root, cors_origins):
    """Run the HTTP JSON API."""
    import uvicorn

    from .service import create_app

    host, _, port = bind.partition(":")
    app = create_app(
        store_root=store_root,
        catalog_path=config.catalog_path,
        profiles_path=config.profiles_path,
        cors_origins=list(cors_origins),
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


def entrypoint(argv: Optional[list[str]] = None) -> int:
    """Programmatic entry point returning the exit code."""
    try:
        main.main(args=argv, prog_name="hotpie", standalone_mode=False, obj=None)
        return 0
    except HotpieError as exc:
        click.echo(f"error[{exc.code}]: {exc}", err=True)
        return 1
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 130
    except SystemExit as exc:  # click --help and friends
        return int(exc.code or 0)


def run() -> None:
    """Console-script entry point."""
    sys.exit(entrypoint())


if __name__ == "__main__":
    run()
