"""Document model: manuscripts, IMRaD-labeled sections, and sentences.

Parses plain-text or Markdown manuscripts into ordered sections whose kinds
are determined solely by a heading alias table, then segments section bodies
into sentences with stable character spans.  Everything here is pure and
deterministic so the same input always re-parses to the same structure.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum

from .errors import NoHeadingsFound, SectionNotFound


class SectionKind(Enum):
    ABSTRACT = "abstract"
    INTRODUCTION = "introduction"
    METHODS = "methods"
    RESULTS = "results"
    DISCUSSION = "discussion"
    CONCLUSIONS = "conclusions"
    OTHER = "other"


#: The four body kinds summary claims are verified against.
IMRAD_KINDS = (
    SectionKind.INTRODUCTION,
    SectionKind.METHODS,
    SectionKind.RESULTS,
    SectionKind.DISCUSSION,
)

#: The two summary kinds the analyses target.
SUMMARY_KINDS = (SectionKind.ABSTRACT, SectionKind.CONCLUSIONS)

# Case-insensitive heading -> kind mapping.  Extensible at parse time via
# the ``extra_aliases`` argument.
DEFAULT_ALIASES: dict[str, SectionKind] = {
    "abstract": SectionKind.ABSTRACT,
    "summary": SectionKind.ABSTRACT,
    "introduction": SectionKind.INTRODUCTION,
    "background": SectionKind.INTRODUCTION,
    "methods": SectionKind.METHODS,
    "method": SectionKind.METHODS,
    "methodology": SectionKind.METHODS,
    "materials and methods": SectionKind.METHODS,
    "experimental": SectionKind.METHODS,
    "experimental section": SectionKind.METHODS,
    "results": SectionKind.RESULTS,
    "results and discussion": SectionKind.RESULTS,
    "discussion": SectionKind.DISCUSSION,
    "conclusion": SectionKind.CONCLUSIONS,
    "conclusions": SectionKind.CONCLUSIONS,
    "concluding remarks": SectionKind.CONCLUSIONS,
    "summary and conclusions": SectionKind.CONCLUSIONS,
}

# Tokens that end with a period but do not terminate a sentence.
ABBREVIATIONS = frozenset(
    {
        "fig", "figs", "eq", "eqs", "ref", "refs", "sec", "tab",
        "al", "et al", "e.g", "i.e", "cf", "vs", "ca", "approx",
        "no", "dr", "prof", "mr", "mrs", "st", "inc", "dept", "univ",
        "resp", "ed", "eds", "vol", "pp", "p", "ch", "viz",
    }
)

_MD_HEADING = re.compile(r"^(#{1,6})\s+(.+?)\s*#*\s*$")
_NUM_PREFIX = re.compile(r"^\d+(\.\d+)*\.?\s+")


@dataclass(frozen=True)
class Sentence:
    """One sentence of a section body, with its span within that body."""

    index: int
    text: str
    span: tuple[int, int]


@dataclass(frozen=True)
class Section:
    """A heading-delimited region of the manuscript.

    ``span`` covers the heading line through the end of the section text in
    the (normalized) raw document; ``body`` is the same slice minus the
    heading line.
    """

    kind: SectionKind
    heading: str
    body: str
    span: tuple[int, int]
    label: str = ""

    @property
    def display_kind(self) -> str:
        if self.kind is SectionKind.OTHER:
            return f"other({self.label})"
        return self.kind.value


@dataclass(frozen=True)
class Manuscript:
    source_id: str
    raw_text: str
    sections: tuple[Section, ...] = field(default_factory=tuple)

    def sections_of_kind(self, kind: SectionKind) -> list[Section]:
        return [s for s in self.sections if s.kind is kind]

    def has_imrad_content(self) -> bool:
        return any(s.kind in IMRAD_KINDS for s in self.sections)


def normalize_text(text: str) -> str:
    """NFC-normalize and unify line endings.

    Superscript/subscript characters are preserved verbatim; only the
    composition form is canonicalized so spans stay stable.
    """
    return unicodedata.normalize("NFC", text.replace("\r\n", "\n").replace("\r", "\n"))


def classify_heading(
    heading: str, aliases: dict[str, SectionKind] | None = None
) -> tuple[SectionKind, str]:
    """Map a heading to a section kind via the alias table.

    Returns ``(kind, label)`` where label is the cleaned heading for
    ``OTHER`` kinds and empty otherwise.
    """
    table = dict(DEFAULT_ALIASES)
    if aliases:
        table.update({k.lower(): v for k, v in aliases.items()})
    cleaned = _NUM_PREFIX.sub("", heading).strip().rstrip(":").strip()
    kind = table.get(cleaned.lower())
    if kind is None:
        return SectionKind.OTHER, cleaned
    return kind, ""


def _is_plain_heading(lines: list[str], i: int) -> bool:
    line = lines[i].strip()
    if not line or len(line) > 80:
        return False
    if line[-1] in ".?!,;":
        return False
    words = _NUM_PREFIX.sub("", line).split()
    if not words or len(words) > 8:
        return False
    if not (line[0].isalnum() and (line[0].isupper() or line[0].isdigit())):
        return False
    # A known alias is always a heading; otherwise require blank-line isolation.
    if classify_heading(line)[0] is not SectionKind.OTHER:
        return True
    prev_blank = i == 0 or not lines[i - 1].strip()
    next_blank = i + 1 >= len(lines) or not lines[i + 1].strip()
    return prev_blank and next_blank


def _find_headings(text: str, format_hint: str) -> list[tuple[int, int, str]]:
    """Return (line_start, line_end, heading_text) for each heading line."""
    headings = []
    lines = text.split("\n")
    pos = 0
    for i, line in enumerate(lines):
        end = pos + len(line)
        m = _MD_HEADING.match(line)
        if format_hint == "markdown" and m:
            headings.append((pos, end, m.group(2)))
        elif format_hint == "plain":
            if m:
                headings.append((pos, end, m.group(2)))
            elif _is_plain_heading(lines, i):
                headings.append((pos, end, line.strip()))
        pos = end + 1
    return headings


def parse_manuscript(
    text: str,
    format_hint: str = "markdown",
    source_id: str = "<input>",
    aliases: dict[str, SectionKind] | None = None,
) -> Manuscript:
    """Parse raw document text into a :class:`Manuscript`.

    Headings are Markdown ATX lines or (for ``plain`` input) isolated short
    title lines; unmatched headings become ``OTHER`` sections.  Raises
    :class:`NoHeadingsFound` when nothing heading-like is present.
    """
    if not text or not text.strip():
        raise NoHeadingsFound("input text is empty")
    if format_hint not in ("plain", "markdown"):
        raise ValueError(f"unknown format hint: {format_hint!r}")
    raw = normalize_text(text)
    headings = _find_headings(raw, format_hint)
    if not headings:
        raise NoHeadingsFound("no section headings detected")

    sections = []
    for n, (h_start, h_end, h_text) in enumerate(headings):
        sec_end = headings[n + 1][0] if n + 1 < len(headings) else len(raw)
        kind, label = classify_heading(h_text, aliases)
        body = raw[h_end:sec_end]
        if body.startswith("\n"):
            body = body[1:]
        sections.append(
            Section(kind=kind, heading=h_text, body=body, span=(h_start, sec_end), label=label)
        )
    return Manuscript(source_id=source_id, raw_text=raw, sections=tuple(sections))


def locate_section(m: Manuscript, kind: SectionKind) -> Section:
    """Return the first section of the requested kind.

    Raises :class:`SectionNotFound` when the manuscript has none.
    """
    for s in m.sections:
        if s.kind is kind:
            return s
    raise SectionNotFound(f"manuscript has no {kind.value} section")


_BOUNDARY = re.compile(r"[.?!](?=[\)\]\"”’']*\s)")


def _token_before(body: str, dot: int) -> str:
    j = dot
    while j > 0 and not body[j - 1].isspace():
        j -= 1
    return body[j:dot]


def segment_sentences(s: Section | str) -> list[Sentence]:
    """Split a section body into ordered, non-overlapping sentences.

    Boundaries are terminal punctuation followed by whitespace and an
    upper-case letter or digit; candidates after a known abbreviation or
    inside an open parenthesis are skipped, so chemical notation and tokens
    like "Fig." never break a sentence.
    """
    body = s.body if isinstance(s, Section) else s
    if not body.strip():
        return []

    breaks = []
    for m in _BOUNDARY.finditer(body):
        i = m.start()
        # position after punctuation plus any closing quotes/brackets
        j = i + 1
        while j < len(body) and body[j] in ")]\"”’'":
            j += 1
        k = j
        while k < len(body) and body[k].isspace():
            k += 1
        if k == j or k >= len(body):
            continue
        nxt = body[k]
        if not (nxt.isupper() or nxt.isdigit() or nxt in "\"“'(["):
            continue
        if body[i] == ".":
            tok = _token_before(body, i).lstrip("([\"“'").lower()
            if tok in ABBREVIATIONS or tok.rstrip(".") in ABBREVIATIONS:
                continue
        if body[:i].count("(") > body[:i].count(")"):
            continue
        breaks.append(j)

    sentences = []
    start = 0
    bounds = breaks + [len(body)]
    for b in bounds:
        seg = body[start:b]
        lead = len(seg) - len(seg.lstrip())
        trail = len(seg) - len(seg.rstrip())
        if seg.strip():
            sentences.append(
                Sentence(
                    index=len(sentences),
                    text=seg.strip(),
                    span=(start + lead, b - trail),
                )
            )
        start = b
    return sentences


def section_as_lone(kind: SectionKind, text: str, heading: str = "") -> Section:
    """Wrap bare section text (no heading) as a Section of the given kind."""
    body = normalize_text(text)
    return Section(kind=kind, heading=heading or kind.value.title(), body=body, span=(0, len(body)))


def section_map(m: Manuscript) -> dict:
    """JSON-serializable map of the parsed section structure."""
    return {
        "source_id": m.source_id,
        "sections": [
            {
                "kind": s.display_kind,
                "heading": s.heading,
                "span": list(s.span),
                "sentences": len(segment_sentences(s)),
            }
            for s in m.sections
        ],
    }


def manuscript_to_json(m: Manuscript) -> str:
    return json.dumps(section_map(m), ensure_ascii=False, indent=2)
