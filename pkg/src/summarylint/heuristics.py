"""Deterministic lexical machinery behind the rule-based analysis backend.

Tokenization, normalized phrase matching, the lexicons (stopwords, finding
verbs, common verbs, expletive patterns), and the claim-decomposition and
classification rules.  Everything is pure: no time, randomness, or locale
dependence, so outputs are byte-stable across runs and platforms.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

# --- lexicons ---------------------------------------------------------------

STOPWORDS = frozenset(
    """a an the of in on for to from at as by with and or but was were is are
    be been being that this these those it its their there which who whom
    whose about approximately also not no nor than then so such may can
    could would should we our us""".split()
)

#: Verbs that assert a result/observation; used by the action-branch check.
FINDING_VERBS = frozenset(
    """show shows showed shown demonstrate demonstrates demonstrated detect
    detects detected observe observes observed find finds found reveal
    reveals revealed measure measures measured confirm confirms confirmed
    identify identifies identified establish establishes established obtain
    obtains obtained determine determines determined characterize
    characterizes characterized record records recorded""".split()
)

#: Finite-verb candidates used to spot clause predicates and standalone
#: demonstratives.  Deliberately small; unknown tokens are treated as nouns.
COMMON_VERBS = frozenset(
    """is are was were has have had illustrates illustrate shows show
    demonstrates demonstrate confirms confirm suggests suggest indicates
    indicate works work highlights highlight represents represent provides
    provide enables enable supports support reflects reflect opens open
    paves pave remains remain allows allow constitutes constitute proves
    prove implies imply reveals reveal underscores underscore emphasizes
    emphasize establishes establish validates validate exemplifies
    exemplify""".split()
)

EXPLETIVE_PATTERN = re.compile(
    r"\b[Ii]t\s+(?:is|was)\s+(?:\w+\s+){0,2}?(?:that|to)\b"
)

_SUPERSCRIPTS = "¹²³⁰⁴⁵⁶⁷⁸⁹"
_SUBSCRIPTS = "".join(chr(c) for c in range(0x2080, 0x208A))
_TOKEN = re.compile(
    rf"\d+(?:[.,]\d+)*|[^\W\d_]+|[{_SUPERSCRIPTS}{_SUBSCRIPTS}]+",
    re.UNICODE,
)


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int

    @property
    def norm(self) -> str:
        return self.text.casefold()


def tokenize(text: str) -> list[Token]:
    """Split text into word/number tokens with character offsets.

    Digit/letter boundaries split ("90mL" -> "90", "mL") so spacing and
    hyphenation variants normalize to the same token stream; superscript and
    subscript runs form their own tokens so chemical notation round-trips.
    """
    text = unicodedata.normalize("NFC", text)
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN.finditer(text)]


def norm_tokens(text: str) -> list[str]:
    return [t.norm for t in tokenize(text)]


def content_tokens(text: str) -> list[str]:
    return [t for t in norm_tokens(text) if t not in STOPWORDS]


def lemma(word: str) -> str:
    """Crude suffix-stripping lemma, good enough for lexicon membership."""
    w = word.casefold()
    for suffix in ("ing", "ed", "es", "s"):
        if len(w) > 3 and w.endswith(suffix):
            return w[: -len(suffix)]
    return w


def find_phrase(group: list[str], haystack: list[Token]) -> tuple[int, int] | None:
    """Locate ``group`` as an in-order token run within ``haystack``.

    Stopword tokens may intervene between consecutive group tokens (so
    "power of NMR" matches "power of the NMR").  Returns the covering
    character interval of the first match, or None.
    """
    if not group:
        return None
    n = len(haystack)
    for i in range(n):
        if haystack[i].norm != group[0]:
            continue
        j, g = i, 1
        ok = True
        while g < len(group):
            j += 1
            skipped = 0
            while j < n and haystack[j].norm != group[g] and haystack[j].norm in STOPWORDS:
                j += 1
                skipped += 1
                if skipped > 3:
                    break
            if j >= n or haystack[j].norm != group[g]:
                ok = False
                break
            g += 1
        if ok:
            return haystack[i].start, haystack[j].end
    return None


def find_word(word: str, haystack: list[Token]) -> tuple[int, int] | None:
    """Locate a single word by lemma-tolerant equality."""
    target = lemma(word)
    for t in haystack:
        if t.norm == word.casefold() or lemma(t.norm) == target:
            return t.start, t.end
    return None


# --- claim decomposition ----------------------------------------------------

#: Unit tokens accepted directly after a number in a quantity phrase.
UNIT_WORDS = frozenset(
    """ml l µl mg g kg µg mol mmol m mm nm cm km h min s hz mhz ppm %
    equiv atm torr pa kpa da kda""".split()
)

_NUMBER = re.compile(r"\d+(?:[.,]\d+)?")
_FOLD_MODIFIER = re.compile(r"\b\d+(?:[.,]\d+)?-\w+")
_CLAIM_SPLIT = re.compile(
    r";\s+|,?\s+\b(?:and|but|while|whereas)\s+(?=(?:we|they|it|this|these|those|the|our)\b)",
    re.IGNORECASE,
)
_FINITE = frozenset("was were is are has have had".split())


@dataclass(frozen=True)
class ClaimFragment:
    """A verifiable fragment of a sentence: its gist, span, and the token
    groups that must each find explicit evidence."""

    gist: str
    span: tuple[int, int]
    groups: tuple[tuple[str, ...], ...]


def split_claims(text: str) -> list[tuple[int, int]]:
    """Split a sentence into independent-claim spans.

    Splits at semicolons and at coordinating conjunctions that introduce a
    new subject ("... and we measured B").
    """
    spans = []
    start = 0
    for m in _CLAIM_SPLIT.finditer(text):
        if text[start : m.start()].strip():
            spans.append((start, m.start()))
        start = m.end()
    if text[start:].strip():
        spans.append((start, len(text)))
    return spans


def _quantity_matches(text: str) -> list[tuple[int, int]]:
    """(start, end) spans of number-plus-unit phrases, e.g. "500 mL"."""
    out = []
    for m in _NUMBER.finditer(text):
        if m.start() > 0 and text[m.start() - 1] in "-–.,−":
            continue
        rest = text[m.end() :]
        um = re.match(r"\s*([^\W\d_]+|%)", rest, re.UNICODE)
        if um and (um.group(1).casefold() in UNIT_WORDS or um.group(1) == "%"):
            out.append((m.start(), m.end() + um.end(1)))
    return out


def _complement(text: str, unit_end: int) -> tuple[int, int] | None:
    """Span of an "of <noun phrase>" complement following a quantity."""
    m = re.match(r"\s+of\s+", text[unit_end:])
    if not m:
        return None
    start = unit_end + m.end()
    end = len(text)
    for stop in re.finditer(r"[,;.]|\s+\b(?:was|were|is|are|has|have|had)\b", text[start:]):
        end = start + stop.start()
        break
    if text[start:end].strip():
        return start, end
    return None


def decompose_claim(text: str, offset: int = 0) -> list[ClaimFragment]:
    """Decompose one claim into verifiable fragments.

    Each quantity (number + unit) becomes its own fragment.  When the
    quantity's "of" complement carries a numeric-fold modifier (e.g. a
    "40-fold enriched" qualifier) the complement splits off as a separate
    fragment so the modifier is flagged independently of the head quantity.
    A claim without quantities yields a single fragment covering the claim.
    """
    frags: list[ClaimFragment] = []
    for q_start, q_end in _quantity_matches(text):
        q_gist = re.sub(r"\s+", " ", text[q_start:q_end])
        comp = _complement(text, q_end)
        if comp is None:
            frags.append(
                ClaimFragment(q_gist, (offset + q_start, offset + q_end), (tuple(norm_tokens(q_gist)),))
            )
            continue
        c_text = text[comp[0] : comp[1]].strip().rstrip(",;")
        mod = _FOLD_MODIFIER.search(c_text)
        if mod:
            frags.append(
                ClaimFragment(q_gist, (offset + q_start, offset + q_end), (tuple(norm_tokens(q_gist)),))
            )
            mod_group = tuple(norm_tokens(c_text[mod.start() : mod.end()]))
            head_group = tuple(content_tokens(c_text[mod.end() :]))
            groups = (mod_group,) + ((head_group,) if head_group else ())
            frags.append(
                ClaimFragment(c_text, (offset + comp[0], offset + comp[1]), groups)
            )
        else:
            gist = re.sub(r"\s+", " ", text[q_start : comp[1]].strip().rstrip(",;"))
            frags.append(
                ClaimFragment(
                    gist,
                    (offset + q_start, offset + comp[1]),
                    (tuple(norm_tokens(q_gist)), tuple(content_tokens(c_text))),
                )
            )
    if not frags:
        gist = text.strip().rstrip(".").strip()
        if gist:
            lead = text.index(gist[0]) if gist else 0
            frags.append(ClaimFragment(gist, (offset + lead, offset + lead + len(gist)), ()))
    return frags


# --- category classification rules -----------------------------------------

# Phrase cues per category, checked against the casefolded gist; the lowest
# matching id wins.  A quantity-bearing gist with no cue defaults to Key
# Finding; otherwise the concluding-remark category is the fallback.
CATEGORY_CUES: dict[int, tuple[str, ...]] = {
    1: ("aim of", "we sought", "objective", "research question", "problem of", "the gap"),
    2: ("was performed using", "were analyzed using", "apparatus", "protocol", "procedure", "methodology", "we employed"),
    3: ("pivotal", "crucial step", "key to the", "novel method", "methodological"),
    4: ("was obtained", "were obtained", "we found", "was observed", "were observed", "showed that", "resulted in", "yield of"),
    5: ("also", "additionally", "in addition", "secondary"),
    6: ("suggests", "suggesting", "indicates", "indicating", "implies", "attributed", "interpreted", "illustrates", "reflects"),
    7: ("confirms the hypothesis", "confirmed the hypothesis", "refutes", "answers the question", "hypothesis was"),
    8: ("consistent with previous", "in agreement with", "previous reports", "previously reported", "literature"),
    9: ("significance", "broader", "importance", "paves the way", "impact on the field", "power of"),
    10: ("can be applied", "practical", "recommend", "application"),
    11: ("limitation", "limited by", "caveat", "constraint"),
    12: ("future", "further studies", "outlook", "warrant further"),
    13: ("in summary", "overall", "taken together", "take-home"),
}


def classify_gist(gist: str) -> tuple[int, str]:
    """Assign a category id to a claim gist; returns (id, rationale)."""
    low = gist.casefold()
    for cid in sorted(CATEGORY_CUES):
        for cue in CATEGORY_CUES[cid]:
            if cue in low:
                return cid, f'cue "{cue}"'
    if _quantity_matches(gist) or _FOLD_MODIFIER.search(gist):
        return 4, "quantitative statement with no other cue"
    return 13, "no cue matched; treated as concluding remark"
