"""Linguistic clarity workflow: ambiguous-pronoun analysis.

Detects third-person and demonstrative pronouns in a summary section,
deconstructs each pronoun's clause into an action verb and substantive
components, gathers antecedent candidates from the preceding sentences
only, and runs a component-wise sufficiency check.  The action verb gets
its own check branch (a finding-verb rule) because interpretive verbs are
more abstract than the substantive components they govern.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum

from .docmodel import (
    Manuscript,
    Section,
    SectionKind,
    Sentence,
    locate_section,
    segment_sentences,
)
from .errors import ClauseParseFailure
from .heuristics import (
    COMMON_VERBS,
    EXPLETIVE_PATTERN,
    FINDING_VERBS,
    STOPWORDS,
    content_tokens,
    find_word,
    lemma,
    tokenize,
)

PRONOUN_LEXEMES = frozenset("it this these that those they".split())
DEMONSTRATIVES = frozenset("this these that those".split())
#: Prepositions that open a scope modifier after the verb's object.
SCOPE_MARKERS = frozenset("in for during within across towards under".split())
_ARTICLES = frozenset("the a an".split())

DEFAULT_WINDOW = 2

_VERB_LEMMAS = frozenset(lemma(v) for v in COMMON_VERBS)


class Branch(Enum):
    ACTION = "action_branch"
    SUBSTANTIVE = "substantive_branch"


class ComponentRole(Enum):
    CONCEPT = "concept"
    SCOPE_MODIFIER = "scope_modifier"
    OTHER_MODIFIER = "other_modifier"


class SupportStatus(Enum):
    SUPPORTED = "supported"
    UNSUPPORTED = "unsupported"


class Verdict(Enum):
    ADEQUATE = "adequate"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class PronounOccurrence:
    lexeme: str
    sentence_ref: tuple[str, int]
    span: tuple[int, int]
    standalone: bool
    expletive: bool
    head_noun: str = ""


@dataclass(frozen=True)
class Component:
    role: ComponentRole
    text: str
    span: tuple[int, int]
    head: str


@dataclass(frozen=True)
class PronounContext:
    action: tuple[str, tuple[int, int]] | None
    substantive_components: tuple[Component, ...]


@dataclass(frozen=True)
class AntecedentCandidate:
    sentence_ref: tuple[str, int]
    span: tuple[int, int]
    text: str


@dataclass(frozen=True)
class ComponentVerdict:
    component: str
    branch: Branch
    status: SupportStatus
    evidence: tuple[tuple[str, int], tuple[int, int]] | None = None


@dataclass(frozen=True)
class AmbiguityFinding:
    pronoun: PronounOccurrence
    verdict: Verdict
    component_verdicts: tuple[ComponentVerdict, ...]
    explanation: str


def detect_pronouns(section: Section, section_kind: SectionKind | None = None) -> list[PronounOccurrence]:
    """Find third-person/demonstrative pronoun occurrences in a section.

    Demonstratives followed by a noun keep that head noun (determiner use);
    expletive "it" constructions are marked and later skipped.  A
    mid-sentence "that" followed by an article or pronoun is treated as a
    complementizer, not an occurrence.
    """
    kind = section_kind or section.kind
    occurrences: list[PronounOccurrence] = []
    for sent in segment_sentences(section):
        toks = tokenize(sent.text)
        for i, tok in enumerate(toks):
            low = tok.norm
            if low not in PRONOUN_LEXEMES:
                continue
            nxt = toks[i + 1].norm if i + 1 < len(toks) else ""
            if low in ("that", "those") and i > 0:
                if nxt in _ARTICLES or nxt in PRONOUN_LEXEMES or nxt in ("we", "they", "it"):
                    continue
            expletive = False
            if low == "it":
                tail = sent.text[tok.start :]
                if EXPLETIVE_PATTERN.match(tail):
                    expletive = True
            standalone = False
            head_noun = ""
            if low in DEMONSTRATIVES:
                if nxt and nxt not in COMMON_VERBS and lemma(nxt) not in _VERB_LEMMAS:
                    head_noun = nxt
                else:
                    standalone = True
            occurrences.append(
                PronounOccurrence(
                    lexeme=tok.text,
                    sentence_ref=(kind.value, sent.index),
                    span=(tok.start, tok.end),
                    standalone=standalone,
                    expletive=expletive,
                    head_noun=head_noun,
                )
            )
    return occurrences


def _clause_end(text: str, start: int) -> int:
    """Pronoun's clause runs to sentence end unless a coordinator introduces
    a new finite verb."""
    for m in re.finditer(r",?\s+\b(?:and|but|while|whereas)\s+(\w+)\s+(\w+)", text[start:]):
        subj, verb = m.group(1).casefold(), m.group(2).casefold()
        if verb in COMMON_VERBS and subj not in COMMON_VERBS:
            return start + m.start()
    return len(text)


def deconstruct_pronoun_context(
    sent: Sentence, p: PronounOccurrence, backend=None
) -> PronounContext:
    """Deconstruct the pronoun's clause into action and substantive parts.

    The first verb after the pronoun is the action; its object splits at
    the first scope-marking preposition into a concept (head noun phrase,
    "of" chains kept) and a scope modifier.  With no scope marker present,
    a trailing "of" phrase peels off the concept as a modifier instead.
    """
    if p.expletive:
        raise ValueError("expletive occurrences are excluded from sufficiency checking")
    text = sent.text
    end = _clause_end(text, p.span[1])
    clause = text[p.span[1] : end]
    toks = tokenize(clause)
    verb_i = None
    for i, t in enumerate(toks):
        if t.norm in COMMON_VERBS:
            verb_i = i
            break
    if verb_i is None:
        raise ClauseParseFailure(f"no finite verb found after pronoun in: {text!r}")
    verb = toks[verb_i]
    action = (verb.text, (p.span[1] + verb.start, p.span[1] + verb.end))

    obj_toks = toks[verb_i + 1 :]
    components: list[Component] = []
    if obj_toks:
        # strip leading articles
        while obj_toks and obj_toks[0].norm in _ARTICLES:
            obj_toks = obj_toks[1:]
    if obj_toks:
        scope_i = None
        depth_of = False
        for i, t in enumerate(obj_toks):
            if t.norm in SCOPE_MARKERS:
                scope_i = i
                break
            if t.norm == "of":
                depth_of = True
        base = p.span[1]
        def _mk(role, tok_slice):
            while tok_slice and tok_slice[0].norm in _ARTICLES:
                tok_slice = tok_slice[1:]
            if not tok_slice:
                return None
            span = (base + tok_slice[0].start, base + tok_slice[-1].end)
            comp_text = clause[tok_slice[0].start : tok_slice[-1].end]
            head = next((t.norm for t in tok_slice if t.norm not in STOPWORDS), tok_slice[0].norm)
            return Component(role=role, text=comp_text, span=span, head=head)

        if scope_i is not None:
            concept = _mk(ComponentRole.CONCEPT, obj_toks[:scope_i])
            scope = _mk(ComponentRole.SCOPE_MODIFIER, obj_toks[scope_i + 1 :])
            components.extend(c for c in (concept, scope) if c)
        elif depth_of:
            of_i = next(i for i, t in enumerate(obj_toks) if t.norm == "of")
            concept = _mk(ComponentRole.CONCEPT, obj_toks[:of_i])
            scope_slice = obj_toks[of_i:]
            span = (base + scope_slice[0].start, base + scope_slice[-1].end)
            comp_text = clause[scope_slice[0].start : scope_slice[-1].end]
            head = next(
                (t.norm for t in scope_slice if t.norm not in STOPWORDS),
                scope_slice[-1].norm,
            )
            components.extend(
                c
                for c in (
                    concept,
                    Component(ComponentRole.SCOPE_MODIFIER, comp_text, span, head),
                )
                if c
            )
        else:
            concept = _mk(ComponentRole.CONCEPT, obj_toks)
            if concept:
                components.append(concept)
    return PronounContext(action=action, substantive_components=tuple(components))


def extract_antecedent_candidates(
    sec: Section,
    p: PronounOccurrence,
    window: int = DEFAULT_WINDOW,
    section_kind: SectionKind | None = None,
) -> list[AntecedentCandidate]:
    """Whole preceding sentences within ``window``, nearest first.

    Text following the pronoun's sentence is never a candidate: a valid
    antecedent must precede the pronoun in document order.
    """
    kind = section_kind or sec.kind
    sentences = segment_sentences(sec)
    p_index = p.sentence_ref[1]
    out: list[AntecedentCandidate] = []
    for idx in range(p_index - 1, max(-1, p_index - 1 - window), -1):
        if idx < 0:
            break
        s = sentences[idx]
        out.append(
            AntecedentCandidate(sentence_ref=(kind.value, s.index), span=s.span, text=s.text)
        )
    return out


def check_component_sufficiency(
    ctx: PronounContext,
    candidates: list[AntecedentCandidate],
    backend=None,
) -> list[ComponentVerdict]:
    """One verdict per context component.

    Substantive branch: the head lemma must appear in a single candidate
    together with at least half of the component's content-word modifiers.
    Action branch: the verb is supported only if some candidate contains a
    finding-class statement (finding-verb lexicon), i.e. something that can
    actually be demonstrated, not merely topical overlap.
    """
    verdicts: list[ComponentVerdict] = []
    cand_toks = [(c, tokenize(c.text)) for c in candidates]

    if ctx.action is not None:
        verb_text = ctx.action[0]
        evidence = None
        for cand, toks in cand_toks:
            hit = next(
                (t for t in toks if t.norm in FINDING_VERBS or lemma(t.norm) in FINDING_VERBS),
                None,
            )
            if hit:
                evidence = (cand.sentence_ref, (hit.start, hit.end))
                break
        verdicts.append(
            ComponentVerdict(
                component=f"action:{verb_text}",
                branch=Branch.ACTION,
                status=SupportStatus.SUPPORTED if evidence else SupportStatus.UNSUPPORTED,
                evidence=evidence,
            )
        )

    for comp in ctx.substantive_components:
        modifiers = [w for w in content_tokens(comp.text) if w != comp.head]
        evidence = None
        for cand, toks in cand_toks:
            head_span = find_word(comp.head, toks)
            if not head_span:
                continue
            if modifiers:
                present = sum(1 for w in modifiers if find_word(w, toks))
                if present * 2 < len(modifiers):
                    continue
            evidence = (cand.sentence_ref, head_span)
            break
        verdicts.append(
            ComponentVerdict(
                component=f"{comp.role.value}:{comp.text}",
                branch=Branch.SUBSTANTIVE,
                status=SupportStatus.SUPPORTED if evidence else SupportStatus.UNSUPPORTED,
                evidence=evidence,
            )
        )
    return verdicts


def analyze_section(
    section: Section,
    window: int = DEFAULT_WINDOW,
    section_kind: SectionKind | None = None,
) -> list[AmbiguityFinding]:
    """Run the pronoun pipeline over one section."""
    kind = section_kind or section.kind
    sentences = segment_sentences(section)
    findings: list[AmbiguityFinding] = []
    for p in detect_pronouns(section, section_kind=kind):
        if p.expletive:
            continue
        if p.head_noun:
            findings.append(
                AmbiguityFinding(
                    pronoun=p,
                    verdict=Verdict.ADEQUATE,
                    component_verdicts=(),
                    explanation=f'determiner use with explicit head noun "{p.head_noun}"',
                )
            )
            continue
        sent = sentences[p.sentence_ref[1]]
        ctx = deconstruct_pronoun_context(sent, p)
        candidates = extract_antecedent_candidates(section, p, window=window, section_kind=kind)
        verdicts = check_component_sufficiency(ctx, candidates)
        unsupported = [v for v in verdicts if v.status is SupportStatus.UNSUPPORTED]
        if not candidates:
            verdict = Verdict.AMBIGUOUS
            explanation = "no antecedent candidate precedes the pronoun"
        elif unsupported:
            verdict = Verdict.AMBIGUOUS
            explanation = (
                "antecedent does not explicitly support: "
                + "; ".join(v.component for v in unsupported)
            )
        else:
            verdict = Verdict.ADEQUATE
            explanation = "all context components explicitly supported by the antecedent"
        findings.append(
            AmbiguityFinding(
                pronoun=p,
                verdict=verdict,
                component_verdicts=tuple(verdicts),
                explanation=explanation,
            )
        )
    return findings


def run_linguistic_workflow(
    source: Manuscript | Section,
    context_mode: str = "limited",
    backend=None,
    window: int = DEFAULT_WINDOW,
    target: SectionKind = SectionKind.CONCLUSIONS,
) -> list[AmbiguityFinding]:
    """Analyze the summary section's pronouns under the given context mode.

    Limited mode takes a lone summary section (or a manuscript, from which
    the target is located); full mode requires a manuscript.  Candidates
    always come from text preceding the pronoun within the summary.
    """
    if context_mode not in ("limited", "full"):
        raise ValueError(f"unknown context mode: {context_mode!r}")
    if context_mode == "full" and not isinstance(source, Manuscript):
        raise ValueError("full context mode requires a parsed manuscript")
    if backend is not None and getattr(backend, "mode", "heuristic") != "heuristic":
        from .backends import gateway_linguistic

        return gateway_linguistic(source, context_mode, backend, window=window, target=target)

    if isinstance(source, Manuscript):
        section = locate_section(source, target)
    else:
        section = source
    return analyze_section(section, window=window, section_kind=target)


def findings_to_dict(findings: list[AmbiguityFinding]) -> dict:
    return {
        "report": "linguistic",
        "pronouns": len(findings),
        "ambiguous": sum(1 for f in findings if f.verdict is Verdict.AMBIGUOUS),
        "findings": [
            {
                "pronoun": f.pronoun.lexeme,
                "sentence": f.pronoun.sentence_ref[1],
                "span": list(f.pronoun.span),
                "standalone": f.pronoun.standalone,
                "verdict": f.verdict.value,
                "components": [
                    {
                        "component": v.component,
                        "branch": v.branch.value,
                        "status": v.status.value,
                    }
                    for v in f.component_verdicts
                ],
                "explanation": f.explanation,
            }
            for f in findings
        ],
    }


def findings_to_json(findings: list[AmbiguityFinding]) -> str:
    return json.dumps(findings_to_dict(findings), ensure_ascii=False, indent=2)


def render_findings_text(findings: list[AmbiguityFinding]) -> str:
    ambiguous = [f for f in findings if f.verdict is Verdict.AMBIGUOUS]
    lines = [
        "LINGUISTIC CLARITY REPORT",
        f"Pronouns analyzed: {len(findings)}",
        f"Ambiguous: {len(ambiguous)}",
        "",
    ]
    for f in findings:
        lines.append(
            f'- {f.verdict.value.upper()}: "{f.pronoun.lexeme}" (sentence {f.pronoun.sentence_ref[1]})'
        )
        for v in f.component_verdicts:
            role, _, text = v.component.partition(":")
            label = role.replace("_", " ")
            lines.append(f'  {label} "{text}": {v.status.value}')
        lines.append(f"  note: {f.explanation}")
    return "\n".join(lines) + "\n"
