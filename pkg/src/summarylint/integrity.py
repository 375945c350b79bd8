"""Informational integrity workflow.

Decomposes summary sentences into Information Units, classifies each one
against the 13-category schema, verifies every unit against the IMRaD body
of the manuscript, and flags whatever is not explicitly substantiated.

Explicitness is the bar throughout: the rule backend does token-level
evidence matching only, and never accepts paraphrase, inference, or numeric
derivation as substantiation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from . import heuristics
from .docmodel import (
    IMRAD_KINDS,
    SUMMARY_KINDS,
    Manuscript,
    Section,
    SectionKind,
    Sentence,
    locate_section,
    segment_sentences,
)
from .errors import NoImradContent
from .heuristics import ClaimFragment, content_tokens, find_phrase, find_word, tokenize
from .iuschema import CategoryAssignment, category_search_targets, get_category, load_schema


class VerificationStatus(Enum):
    SUBSTANTIATED = "substantiated"
    UNSUBSTANTIATED = "unsubstantiated"
    PARTIALLY_SUBSTANTIATED = "partially_substantiated"


@dataclass(frozen=True)
class InformationUnit:
    """A discrete claim fragment extracted from a summary sentence."""

    id: str
    sentence_ref: tuple[str, int]
    spans: tuple[tuple[int, int], ...]
    gist: str
    assignment: CategoryAssignment
    token_groups: tuple[tuple[str, ...], ...] = ()


@dataclass(frozen=True)
class VerificationVerdict:
    status: VerificationStatus
    evidence: tuple[tuple[str, tuple[int, int]], ...]
    searched: tuple[str, ...]
    note: str = ""


@dataclass
class IntegrityReport:
    target: SectionKind
    units: list[tuple[InformationUnit, VerificationVerdict]] = field(default_factory=list)
    sentence_count: int = 0

    @property
    def flags(self) -> list[tuple[InformationUnit, VerificationVerdict]]:
        return [
            (iu, v) for iu, v in self.units if v.status is not VerificationStatus.SUBSTANTIATED
        ]

    @property
    def flag_gists(self) -> list[str]:
        return [iu.gist for iu, _ in self.flags]

    def to_dict(self) -> dict:
        return {
            "report": "integrity",
            "target": self.target.value,
            "sentences": self.sentence_count,
            "units": [
                {
                    "id": iu.id,
                    "sentence": iu.sentence_ref[1],
                    "gist": iu.gist,
                    "category": iu.assignment.category_id,
                    "rationale": iu.assignment.rationale,
                    "status": v.status.value,
                    "evidence": [
                        {"section": kind, "span": list(span)} for kind, span in v.evidence
                    ],
                    "searched": list(v.searched),
                    "note": v.note,
                }
                for iu, v in self.units
            ],
            "flags": self.flag_gists,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    def render_text(self) -> str:
        lines = [
            "INFORMATIONAL INTEGRITY REPORT",
            f"Target section: {self.target.value}",
            f"Units analyzed: {len(self.units)}",
            f"Flags: {len(self.flags)}",
            "",
        ]
        for iu, v in self.units:
            marker = v.status.value.replace("_", " ").upper()
            lines.append(f'- {marker}: "{iu.gist}" (sentence {iu.sentence_ref[1]}, category {iu.assignment.category_id})')
            if v.note:
                lines.append(f"  note: {v.note}")
        return "\n".join(lines) + "\n"


def decompose_into_ius(
    sentence: Sentence,
    backend=None,
    section_kind: SectionKind = SectionKind.CONCLUSIONS,
) -> list[InformationUnit]:
    """Decompose one summary sentence into classified Information Units.

    Quantity-bearing noun phrases yield separate units for the head quantity
    and for each fold-style factual modifier; other claims yield one unit
    each.  Classification happens here so every unit leaves with a category
    assignment.
    """
    if not sentence.text.strip():
        raise ValueError("sentence text is empty")
    load_schema()
    units: list[InformationUnit] = []
    for c_start, c_end in heuristics.split_claims(sentence.text):
        claim = sentence.text[c_start:c_end]
        for frag in heuristics.decompose_claim(claim, offset=c_start):
            cid, why = heuristics.classify_gist(frag.gist)
            units.append(
                InformationUnit(
                    id=f"{section_kind.value}:{sentence.index}:{len(units)}",
                    sentence_ref=(section_kind.value, sentence.index),
                    spans=(frag.span,),
                    gist=frag.gist,
                    assignment=CategoryAssignment(category_id=cid, rationale=why),
                    token_groups=frag.groups,
                )
            )
    return units


def classify_iu(iu: InformationUnit, schema=None, backend=None) -> CategoryAssignment:
    """(Re-)classify a unit's gist against the 13-category schema."""
    load_schema()
    cid, why = heuristics.classify_gist(iu.gist)
    return CategoryAssignment(category_id=cid, rationale=why)


def _section_tokens(sec: Section, base: int) -> list:
    toks = tokenize(sec.body)
    return [heuristics.Token(t.text, t.start + base, t.end + base) for t in toks]


def _body_base(m: Manuscript, sec: Section) -> int:
    # body starts after the heading line within the section span
    return sec.span[1] - len(sec.body)


def verify_iu(iu: InformationUnit, m: Manuscript, schema=None, backend=None) -> VerificationVerdict:
    """Verify a unit against the manuscript's IMRaD sections.

    Search order follows the unit's category (primary locations first).
    With token groups present, every group must match for full
    substantiation; a strict subset matching yields a partial verdict.
    Units without token groups fall back to a content-word coverage rule:
    at least half the gist's content words must appear in a single section.
    """
    if not m.has_imrad_content():
        raise NoImradContent("manuscript has no IMRaD sections to verify against")
    category = get_category(iu.assignment.category_id)
    targets = category_search_targets(category)

    searched: list[str] = []
    evidence: list[tuple[str, tuple[int, int]]] = []
    matched_groups: set[int] = set()
    note = ""

    groups = iu.token_groups
    loose = not groups

    for kind in targets:
        secs = m.sections_of_kind(kind)
        if not secs:
            searched.append(kind.value)
            continue
        searched.append(kind.value)
        for sec in secs:
            base = _body_base(m, sec)
            toks = _section_tokens(sec, base)
            if loose:
                words = []
                seen = set()
                for w in content_tokens(iu.gist):
                    if w not in seen:
                        seen.add(w)
                        words.append(w)
                hits = [(w, find_word(w, toks)) for w in words]
                found = [(w, span) for w, span in hits if span]
                if words and len(found) >= math.ceil(len(words) / 2):
                    for _, span in found:
                        evidence.append((kind.value, span))
                    note = f"{len(found)}/{len(words)} content words located in {kind.value}"
                    return VerificationVerdict(
                        VerificationStatus.SUBSTANTIATED,
                        tuple(evidence),
                        tuple(searched),
                        note,
                    )
            else:
                for gi, group in enumerate(groups):
                    if gi in matched_groups:
                        continue
                    span = find_phrase(list(group), toks)
                    if span:
                        matched_groups.add(gi)
                        evidence.append((kind.value, span))
        if not loose and len(matched_groups) == len(groups):
            break

    if loose:
        return VerificationVerdict(
            VerificationStatus.UNSUBSTANTIATED,
            (),
            tuple(searched),
            "no section explicitly states this claim",
        )
    if len(matched_groups) == len(groups):
        status = VerificationStatus.SUBSTANTIATED
        note = "all token groups explicitly stated"
    elif matched_groups:
        status = VerificationStatus.PARTIALLY_SUBSTANTIATED
        missing = [" ".join(g) for gi, g in enumerate(groups) if gi not in matched_groups]
        note = "missing explicit statement of: " + "; ".join(missing)
    else:
        status = VerificationStatus.UNSUBSTANTIATED
        evidence = []
        note = "no token group explicitly stated"
    return VerificationVerdict(status, tuple(evidence), tuple(searched), note)


def run_integrity_workflow(
    m: Manuscript, target: SectionKind, backend=None
) -> IntegrityReport:
    """Run the full integrity pipeline over one summary section.

    ``backend`` may be a gateway backend (replay/live); the rule engine runs
    when it is None or heuristic-mode.  Gateway backends return the parsed
    flags from the model transcript instead of rule-engine verdicts.
    """
    if target not in SUMMARY_KINDS:
        raise ValueError(f"target must be a summary kind, got {target.value}")
    if backend is not None and getattr(backend, "mode", "heuristic") != "heuristic":
        from .backends import gateway_integrity

        return gateway_integrity(m, target, backend)

    section = locate_section(m, target)
    if not m.has_imrad_content():
        raise NoImradContent("manuscript has only summary sections")
    sentences = segment_sentences(section)
    report = IntegrityReport(target=target, sentence_count=len(sentences))
    for sent in sentences:
        for iu in decompose_into_ius(sent, section_kind=target):
            verdict = verify_iu(iu, m)
            report.units.append((iu, verdict))
    return report
