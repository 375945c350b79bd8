"""Execution backends: live HTTP, recorded replay, and the rule engine.

The gateway runs one stateless analysis per call (fresh context each time),
parses the model's plain-text report back into domain objects, and keeps
the replay cursor and rate limiter safe to use from concurrent runs.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    BackendFailure,
    NetworkFailure,
    NoHeadingsFound,
    ParseFailure,
    RateLimited,
    ReplayExhausted,
)

API_KEY_ENV = "SUMMARYLINT_API_KEY"


@dataclass(frozen=True)
class BackendDescriptor:
    mode: str  # live | replay | heuristic
    endpoint: str | None = None
    model_name: str | None = None
    replay_store: str | None = None
    rate_limit: int = 60  # requests per minute

    def __post_init__(self):
        if self.mode not in ("live", "replay", "heuristic"):
            raise ValueError(f"unknown backend mode: {self.mode!r}")
        if self.mode == "live" and not (self.endpoint and self.model_name):
            raise ValueError("live mode requires endpoint and model_name")
        if self.mode == "replay" and not self.replay_store:
            raise ValueError("replay mode requires replay_store")


@dataclass
class ModelOutput:
    raw_text: str
    parsed: "ParsedReport | None" = None
    metadata: dict = field(default_factory=dict)


@dataclass
class ParsedReport:
    """Flags recovered from a model transcript.

    ``flags`` holds the flagged phrases: unsubstantiated unit gists for
    integrity reports, unsupported component texts for linguistic ones.
    """

    kind: str  # integrity_report | linguistic_report
    flags: list[str] = field(default_factory=list)
    ambiguous_pronouns: list[str] = field(default_factory=list)


class RateLimiter:
    """Sliding-window limiter: the N+1th request within a minute is delayed,
    never dropped.  Thread-safe; clock and sleep are injectable for tests."""

    def __init__(self, per_minute: int, clock=time.monotonic, sleep=time.sleep):
        self.per_minute = max(1, per_minute)
        self._clock = clock
        self._sleep = sleep
        self._stamps: list[float] = []
        self._lock = threading.Lock()

    def acquire(self) -> float:
        """Block until a slot is free; returns the delay that was imposed."""
        delayed = 0.0
        while True:
            with self._lock:
                now = self._clock()
                self._stamps = [t for t in self._stamps if now - t < 60.0]
                if len(self._stamps) < self.per_minute:
                    self._stamps.append(now)
                    return delayed
                wait = 60.0 - (now - self._stamps[0])
            delayed += wait
            self._sleep(wait)


def _prompt_marker(prompt: str, name: str) -> str | None:
    m = re.search(rf"^{re.escape(name)}:\s*(.+)$", prompt, re.MULTILINE)
    return m.group(1).strip() if m else None


class HeuristicBackend:
    """Deterministic rule-engine backend; the model-free oracle."""

    mode = "heuristic"

    def execute(self, prompt: str, attachment: str, prompt_id: str = "") -> ModelOutput:
        from .docmodel import SectionKind, parse_manuscript, section_as_lone
        from .integrity import run_integrity_workflow
        from .linguistic import render_findings_text, run_linguistic_workflow

        section_name = _prompt_marker(prompt, "Target section") or "conclusions"
        context_mode = _prompt_marker(prompt, "Context mode") or "full"
        window = int(_prompt_marker(prompt, "Window") or 2)
        try:
            target = SectionKind(section_name.strip().lower())
        except ValueError:
            target = SectionKind.CONCLUSIONS

        analysis = "linguistic" if "linguistic" in (prompt_id or "") else "integrity"
        if not prompt_id:
            analysis = "linguistic" if "pronoun" in prompt.lower() else "integrity"

        try:
            manuscript = parse_manuscript(attachment, format_hint="markdown")
        except NoHeadingsFound:
            manuscript = None

        if analysis == "integrity":
            if manuscript is None:
                raise BackendFailure("integrity analysis requires a parseable manuscript")
            report = run_integrity_workflow(manuscript, target)
            raw = report.render_text()
            parsed = ParsedReport(
                kind="integrity_report",
                flags=list(report.flag_gists),
            )
        else:
            source = manuscript
            if source is None or not source.has_imrad_content():
                body = attachment if manuscript is None else manuscript.raw_text
                source = section_as_lone(target, body)
                context_mode = "limited"
            findings = run_linguistic_workflow(
                source, context_mode=context_mode, window=window, target=target
            )
            raw = render_findings_text(findings)
            parsed = _parsed_from_findings(findings)
        return ModelOutput(
            raw_text=raw,
            parsed=parsed,
            metadata={"backend": "heuristic", "prompt_id": prompt_id, "timestamp": time.time()},
        )


class ReplayBackend:
    """Serves pre-recorded transcripts from a store directory in run order.

    Store layout: ``manifest.json`` with a ``runs`` list of file names
    (zero-padded order) and an optional ``excluded`` map of run index to
    reason; one text file per run.
    """

    mode = "replay"

    def __init__(self, store: str | Path):
        self.store = Path(store)
        manifest_path = self.store / "manifest.json"
        if not manifest_path.is_file():
            raise BackendFailure(f"replay store has no manifest: {manifest_path}")
        self.manifest = json.loads(manifest_path.read_text("utf-8"))
        self.runs: list[str] = self.manifest.get("runs", [])
        self.excluded: dict[int, str] = {
            int(k): v for k, v in self.manifest.get("excluded", {}).items()
        }
        self._cursor = 0
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.runs)

    def execute(self, prompt: str, attachment: str, prompt_id: str = "") -> ModelOutput:
        with self._lock:
            index = self._cursor
            self._cursor += 1
        return self.output_for(index, prompt_id=prompt_id)

    def output_for(self, index: int, prompt_id: str = "") -> ModelOutput:
        if index >= len(self.runs):
            raise ReplayExhausted(
                f"replay store {self.store} has {len(self.runs)} runs; run index {index} requested"
            )
        raw = (self.store / self.runs[index]).read_text("utf-8")
        return ModelOutput(
            raw_text=raw,
            metadata={
                "backend": "replay",
                "prompt_id": prompt_id,
                "run_index": index,
                "excluded_reason": self.excluded.get(index),
                "timestamp": time.time(),
            },
        )


class LiveBackend:
    """One stateless chat-completion HTTP request per run.

    The wire contract is a single user message carrying the prompt plus the
    attachment text; provider specifics belong in the descriptor, not here.
    Credentials come from the ``SUMMARYLINT_API_KEY`` environment variable.
    """

    mode = "live"

    def __init__(self, descriptor: BackendDescriptor, transport=None, clock=time.monotonic, sleep=time.sleep):
        import httpx

        self.descriptor = descriptor
        self.limiter = RateLimiter(descriptor.rate_limit, clock=clock, sleep=sleep)
        headers = {}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(headers=headers, transport=transport, timeout=120.0)

    def execute(self, prompt: str, attachment: str, prompt_id: str = "") -> ModelOutput:
        import httpx

        self.limiter.acquire()
        payload = {
            "model": self.descriptor.model_name,
            "messages": [
                {"role": "user", "content": prompt + "\n\n--- ATTACHMENT ---\n\n" + attachment}
            ],
        }
        try:
            resp = self._client.post(self.descriptor.endpoint, json=payload)
        except httpx.HTTPError as exc:
            raise NetworkFailure(str(exc)) from exc
        if resp.status_code == 429:
            raise RateLimited("endpoint rejected request: rate limited")
        if resp.status_code >= 400:
            raise NetworkFailure(f"endpoint returned HTTP {resp.status_code}")
        raw = _extract_content(resp)
        return ModelOutput(
            raw_text=raw,
            metadata={"backend": "live", "prompt_id": prompt_id, "timestamp": time.time()},
        )


def _extract_content(resp) -> str:
    try:
        data = resp.json()
    except ValueError:
        return resp.text
    if isinstance(data, dict):
        if "content" in data and isinstance(data["content"], str):
            return data["content"]
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            pass
    return resp.text


def make_backend(descriptor: BackendDescriptor, transport=None):
    if descriptor.mode == "heuristic":
        return HeuristicBackend()
    if descriptor.mode == "replay":
        return ReplayBackend(descriptor.replay_store)
    return LiveBackend(descriptor, transport=transport)


def execute(backend, prompt: str, attachment: str, prompt_id: str = "") -> ModelOutput:
    """Run one isolated analysis against a backend instance or descriptor."""
    if isinstance(backend, BackendDescriptor):
        backend = make_backend(backend)
    return backend.execute(prompt, attachment, prompt_id=prompt_id)


# --- output parsing ---------------------------------------------------------

_QUOTED = re.compile(r"[\"“”]([^\"“”]+)[\"“”]")
_DASH_FLAG = re.compile(r"^[-*\s]*(.+?)\s*[—–-]{1,2}\s*(?:not\s+substantiated|unsubstantiated)", re.IGNORECASE)
_UNSUPPORTED_LINE = re.compile(r":\s*unsupported\b", re.IGNORECASE)
_AMBIG_LINE = re.compile(r"\bambiguous\b", re.IGNORECASE)


def parse_structured_output(output: ModelOutput, expected: str) -> ParsedReport:
    """Recover the flag list from a model transcript.

    Tolerant of surrounding prose; strict about the flags themselves: a
    flagged phrase must appear quoted on its marker line (or precede an
    "— unsubstantiated" marker).  Raises :class:`ParseFailure` on empty
    output.
    """
    if expected not in ("integrity_report", "linguistic_report"):
        raise ValueError(f"unknown expected report kind: {expected!r}")
    raw = output.raw_text
    if not raw or not raw.strip():
        raise ParseFailure("model output is empty")
    report = ParsedReport(kind=expected)
    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if expected == "integrity_report":
            low = stripped.lower()
            if "unsubstantiated" in low or "partially substantiated" in low:
                q = _QUOTED.search(stripped)
                if q:
                    report.flags.append(q.group(1).strip())
                    continue
                m = _DASH_FLAG.match(stripped)
                if m:
                    report.flags.append(m.group(1).strip().strip("\"“”"))
        else:
            if _UNSUPPORTED_LINE.search(stripped):
                q = _QUOTED.search(stripped)
                if q:
                    report.flags.append(q.group(1).strip())
            elif _AMBIG_LINE.search(stripped):
                q = _QUOTED.search(stripped)
                if q:
                    report.ambiguous_pronouns.append(q.group(1).strip())
    return report


def _parsed_from_findings(findings) -> ParsedReport:
    from .linguistic import SupportStatus, Verdict

    report = ParsedReport(kind="linguistic_report")
    for f in findings:
        if f.verdict is Verdict.AMBIGUOUS:
            report.ambiguous_pronouns.append(f.pronoun.lexeme)
        for v in f.component_verdicts:
            if v.status is SupportStatus.UNSUPPORTED:
                report.flags.append(v.component.partition(":")[2])
    return report


# --- gateway entry points for workflow modules ------------------------------


def gateway_integrity(manuscript, target, backend):
    """Run the integrity analysis through a gateway backend and lift the
    parsed transcript into an :class:`IntegrityReport`."""
    from .integrity import (
        InformationUnit,
        IntegrityReport,
        VerificationStatus,
        VerificationVerdict,
    )
    from .iuschema import CategoryAssignment, category_search_targets, get_category
    from .heuristics import classify_gist
    from .prompts import render_integrity_prompt

    prompt = render_integrity_prompt(target.value)
    out = execute(backend, prompt, manuscript.raw_text, prompt_id="integrity-v1")
    parsed = out.parsed or parse_structured_output(out, "integrity_report")
    report = IntegrityReport(target=target)
    for i, gist in enumerate(parsed.flags):
        cid, why = classify_gist(gist)
        searched = tuple(k.value for k in category_search_targets(get_category(cid)))
        iu = InformationUnit(
            id=f"{target.value}:model:{i}",
            sentence_ref=(target.value, -1),
            spans=(),
            gist=gist,
            assignment=CategoryAssignment(category_id=cid, rationale=why),
        )
        verdict = VerificationVerdict(
            status=VerificationStatus.UNSUBSTANTIATED,
            evidence=(),
            searched=searched,
            note="flag reported by model transcript",
        )
        report.units.append((iu, verdict))
    return report


def gateway_linguistic(source, context_mode, backend, window=2, target=None):
    """Run the linguistic analysis through a gateway backend and lift the
    parsed transcript into ambiguity findings."""
    from .docmodel import Manuscript, SectionKind
    from .linguistic import (
        AmbiguityFinding,
        Branch,
        ComponentVerdict,
        PronounOccurrence,
        SupportStatus,
        Verdict,
    )
    from .prompts import render_linguistic_prompt

    target = target or SectionKind.CONCLUSIONS
    text = source.raw_text if isinstance(source, Manuscript) else source.body
    prompt = render_linguistic_prompt(target.value, context_mode, window)
    out = execute(backend, prompt, text, prompt_id="linguistic-v1")
    parsed = out.parsed or parse_structured_output(out, "linguistic_report")
    findings = []
    components = tuple(
        ComponentVerdict(
            component=f"reported:{flag}",
            branch=Branch.SUBSTANTIVE,
            status=SupportStatus.UNSUPPORTED,
        )
        for flag in parsed.flags
    )
    for lexeme in parsed.ambiguous_pronouns:
        findings.append(
            AmbiguityFinding(
                pronoun=PronounOccurrence(
                    lexeme=lexeme,
                    sentence_ref=(target.value, -1),
                    span=(0, 0),
                    standalone=True,
                    expletive=False,
                ),
                verdict=Verdict.AMBIGUOUS,
                component_verdicts=components,
                explanation="reported ambiguous by model transcript",
            )
        )
    return findings
