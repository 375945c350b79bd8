"""summarylint: flags unsubstantiated claims and ambiguous pronouns in
academic summary sections, with a deterministic rule engine, record/replay
model backends, and a repeated-run evaluation harness."""

from .docmodel import (
    Manuscript,
    Section,
    SectionKind,
    Sentence,
    locate_section,
    parse_manuscript,
    segment_sentences,
)
from .integrity import IntegrityReport, run_integrity_workflow
from .iuschema import IUCategory, category_search_targets, load_schema
from .linguistic import AmbiguityFinding, run_linguistic_workflow

__version__ = "0.1.0"

__all__ = [
    "AmbiguityFinding",
    "IntegrityReport",
    "IUCategory",
    "Manuscript",
    "Section",
    "SectionKind",
    "Sentence",
    "category_search_targets",
    "load_schema",
    "locate_section",
    "parse_manuscript",
    "run_integrity_workflow",
    "run_linguistic_workflow",
    "segment_sentences",
    "__version__",
]
