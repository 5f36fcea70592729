"""hotpie: capture and track epistemic uncertainty during hazard analysis.

The package keeps a reference catalog of causal factors and path keywords,
models causal paths between system objects with an evidence-driven
classification state machine, analyses architectural-view coverage, and
bridges into STPA-style control structures. See the CLI (``hotpie --help``)
and the HTTP service (``hotpie serve``) for the front ends.
"""

from .analysis import (
    CoverageMatrix,
    RepresentationLevel,
    SuggestionPrompt,
    ViewCategory,
    ViewProfile,
    factor_usage,
    gap_report,
    load_default_profiles,
    load_profiles,
    merge_coverage,
    stale_report,
    suggest_paths,
)
from .errors import HotpieError
from .model import (
    Abstraction,
    CausalEndpoint,
    CausalPath,
    Classification,
    EvidenceEntry,
    LifecyclePhase,
    Project,
    SystemObject,
)
from .reports import coverage_csv, export_dot, render_report
from .storage import (
    load_example_project,
    load_project,
    load_project_file,
    save_project,
    save_project_file,
)
from .stpa import (
    AugmentationFinding,
    ControlStructure,
    Disposition,
    export_findings,
    import_control_structure,
    materialize,
    prompts_for_relations,
)
from .taxonomy import (
    FACTOR_ORDER,
    PathTemplate,
    PrimaryFactor,
    ReferenceCatalog,
    SecondaryFactor,
    load_catalog,
    load_default_catalog,
    lookup_templates,
    search_keywords,
)

__version__ = "0.1.0"

__all__ = [
    "Abstraction",
    "AugmentationFinding",
    "CausalEndpoint",
    "CausalPath",
    "Classification",
    "ControlStructure",
    "CoverageMatrix",
    "Disposition",
    "EvidenceEntry",
    "FACTOR_ORDER",
    "HotpieError",
    "LifecyclePhase",
    "PathTemplate",
    "PrimaryFactor",
    "Project",
    "ReferenceCatalog",
    "RepresentationLevel",
    "SecondaryFactor",
    "SuggestionPrompt",
    "SystemObject",
    "ViewCategory",
    "ViewProfile",
    "coverage_csv",
    "export_dot",
    "export_findings",
    "factor_usage",
    "gap_report",
    "import_control_structure",
    "load_catalog",
    "load_default_catalog",
    "load_default_profiles",
    "load_example_project",
    "load_profiles",
    "load_project",
    "load_project_file",
    "lookup_templates",
    "materialize",
    "merge_coverage",
    "prompts_for_relations",
    "render_report",
    "save_project",
    "save_project_file",
    "search_keywords",
    "stale_report",
    "suggest_paths",
]
