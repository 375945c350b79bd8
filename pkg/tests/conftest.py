import json
from pathlib import Path

import pytest

from summarylint import docmodel

FIXTURES = Path(__file__).parent / "fixtures"

# Transcript bodies modeled on real model report styles.

INTEGRITY_FLAG_LINES = {
    "90mL": '- "90 mL of H₂¹⁷O" — unsubstantiated: the output quantity is not stated in the main text.',
    "40fold": '- "40-fold enriched water" — unsubstantiated: the enrichment factor is not stated in the main text.',
}

INTEGRITY_HEADER = (
    "Analysis of the Conclusions section.\n\n"
    "Information Units were extracted, classified, and verified against the "
    "main text of the attached manuscript.\n\n"
    '- "500 mL" — substantiated (stated in the Methods section).\n'
)

LINGUISTIC_SUCCESS = (
    "Pronoun analysis of the Conclusions section.\n\n"
    '- AMBIGUOUS: "This" (sentence 5)\n'
    '  action "illustrates": supported\n'
    '  concept "power of ¹⁷O NMR": unsupported\n'
    '  scope modifier "detection of the reactions of O-containing functional groups": unsupported\n'
)

LINGUISTIC_FAILURE = (
    "Pronoun analysis of the Conclusions section.\n\n"
    '- ADEQUATE: "This" (sentence 5)\n'
    "  The preceding sentence provides sufficient support for all components.\n"
)


def write_store(store_dir: Path, transcripts: list[str], excluded: dict[int, str] | None = None) -> Path:
    store_dir.mkdir(parents=True, exist_ok=True)
    runs = []
    for i, text in enumerate(transcripts):
        name = f"run_{i:03d}.txt"
        (store_dir / name).write_text(text, encoding="utf-8")
        runs.append(name)
    manifest = {"runs": runs}
    if excluded:
        manifest["excluded"] = {str(k): v for k, v in excluded.items()}
    (store_dir / "manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return store_dir


def integrity_transcript(flag_90ml: bool, flag_40fold: bool, note: str = "") -> str:
    lines = [INTEGRITY_HEADER]
    if flag_90ml:
        lines.append(INTEGRITY_FLAG_LINES["90mL"] + "\n")
    if flag_40fold:
        lines.append(INTEGRITY_FLAG_LINES["40fold"] + "\n")
    if not flag_90ml and not flag_40fold:
        lines.append("No unsubstantiated information was identified in this section.\n")
    if note:
        lines.append(note + "\n")
    return "".join(lines)


def linguistic_transcripts(n_runs: int, successes: int) -> list[str]:
    """Deterministic run series: failures occupy the trailing run indices."""
    return [
        LINGUISTIC_SUCCESS if i < successes else LINGUISTIC_FAILURE for i in range(n_runs)
    ]


@pytest.fixture(scope="session")
def manuscript_text() -> str:
    return (FIXTURES / "enrichment_manuscript.md").read_text("utf-8")


@pytest.fixture(scope="session")
def manuscript(manuscript_text) -> docmodel.Manuscript:
    return docmodel.parse_manuscript(manuscript_text, source_id="enrichment")


@pytest.fixture(scope="session")
def conclusions(manuscript) -> docmodel.Section:
    return docmodel.locate_section(manuscript, docmodel.SectionKind.CONCLUSIONS)
