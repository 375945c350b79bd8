"""Repeated-run evaluation harness.

Configures run series, executes N isolated runs against a backend, scores
per-target hits on each parsed output, and aggregates success-rate tables.
Exact fractions are always kept; displayed rates round half-up to the
nearest 5 percent.  Run logs are append-only; tables are derived artifacts,
never hand-edited.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .backends import (
    BackendDescriptor,
    ParsedReport,
    execute,
    make_backend,
    parse_structured_output,
)
from .errors import BackendFailure, EmptySeries, IoFailure, ParseFailure
from .heuristics import find_phrase, norm_tokens, tokenize
from .prompts import render_integrity_prompt, render_linguistic_prompt


@dataclass(frozen=True)
class TargetCriterion:
    """A deterministic matcher over parsed report flags."""

    id: str
    phrase: str
    description: str = ""

    def matches(self, parsed: ParsedReport) -> bool:
        want = norm_tokens(self.phrase)
        for flag in parsed.flags:
            if find_phrase(want, tokenize(flag)) is not None:
                return True
        return False


@dataclass(frozen=True)
class SeriesConfig:
    label: str
    prompt_id: str
    context_mode: str
    n_runs: int
    backend: BackendDescriptor
    criteria: tuple[TargetCriterion, ...]
    primary_criterion: str = ""
    section: str = "conclusions"
    window: int = 2
    input_path: str | None = None

    def __post_init__(self):
        if self.n_runs < 1:
            raise EmptySeries(f"series {self.label!r}: n_runs must be >= 1")
        if not self.criteria:
            raise EmptySeries(f"series {self.label!r}: criteria must be non-empty")
        if self.context_mode not in ("limited", "full"):
            raise ValueError(f"unknown context mode: {self.context_mode!r}")

    @property
    def expected_kind(self) -> str:
        return "linguistic_report" if "linguistic" in self.prompt_id else "integrity_report"


@dataclass
class RunRecord:
    run_index: int
    timestamp: float
    raw_ref: str | None
    parse_status: str  # ok | parse_failure
    hits: dict[str, bool]
    excluded_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "run_index": self.run_index,
            "timestamp": self.timestamp,
            "raw_ref": self.raw_ref,
            "parse_status": self.parse_status,
            "hits": self.hits,
            "excluded_reason": self.excluded_reason,
        }


@dataclass(frozen=True)
class SuccessRow:
    series: str
    context: str
    runs: int
    successes: int
    failures: int
    rate_exact: Fraction
    rate_display: int


@dataclass
class SuccessTable:
    rows: list[SuccessRow] = field(default_factory=list)


def display_rate(successes: int, runs: int) -> int:
    """Percent rounded half-up to the nearest 5 (exact arithmetic)."""
    if runs <= 0:
        raise ValueError("runs must be positive")
    q = Fraction(successes * 20, runs) + Fraction(1, 2)
    return (q.numerator // q.denominator) * 5


def score_run(parsed: ParsedReport | None, criteria) -> dict[str, bool]:
    """Per-criterion hit map; a parse failure scores every target as a miss."""
    if parsed is None:
        return {c.id: False for c in criteria}
    return {c.id: c.matches(parsed) for c in criteria}


def render_series_prompt(cfg: SeriesConfig) -> str:
    if cfg.expected_kind == "linguistic_report":
        return render_linguistic_prompt(cfg.section, cfg.context_mode, cfg.window)
    return render_integrity_prompt(cfg.section)


def run_series(
    cfg: SeriesConfig,
    attachment: str = "",
    sink=None,
) -> list[RunRecord]:
    """Execute exactly ``n_runs`` isolated runs and score each one.

    ``sink(index, raw_text)`` receives every raw output for persistence.
    A backend failure aborts the series; records completed so far are
    returned attached to the raised exception (``partial_records``).
    """
    backend = make_backend(cfg.backend)
    prompt = render_series_prompt(cfg)
    if not attachment and cfg.input_path:
        attachment = Path(cfg.input_path).read_text("utf-8")
    records: list[RunRecord] = []
    for i in range(cfg.n_runs):
        try:
            out = execute(backend, prompt, attachment, prompt_id=cfg.prompt_id)
        except BackendFailure as exc:
            exc.partial_records = records
            raise
        if sink is not None:
            sink(i, out.raw_text)
        try:
            parsed = out.parsed or parse_structured_output(out, cfg.expected_kind)
            status = "ok"
        except ParseFailure:
            parsed = None
            status = "parse_failure"
        records.append(
            RunRecord(
                run_index=i,
                timestamp=time.time(),
                raw_ref=f"run_{i:03d}.txt",
                parse_status=status,
                hits=score_run(parsed, cfg.criteria),
                excluded_reason=out.metadata.get("excluded_reason"),
            )
        )
    return records


def summarize(
    records: list[RunRecord],
    primary_criterion: str,
    series: str = "",
    context: str = "",
) -> SuccessRow:
    """Aggregate one series into a success-rate row.

    Excluded records are omitted from runs, successes, and failures alike.
    """
    if not records:
        raise EmptySeries("cannot summarize an empty record list")
    counted = [r for r in records if not r.excluded_reason]
    runs = len(counted)
    if runs == 0:
        raise EmptySeries("all records in the series are excluded")
    successes = sum(1 for r in counted if r.hits.get(primary_criterion, False))
    return SuccessRow(
        series=series,
        context=context,
        runs=runs,
        successes=successes,
        failures=runs - successes,
        rate_exact=Fraction(successes, runs),
        rate_display=display_rate(successes, runs),
    )


def criterion_hits(records: list[RunRecord], criterion_id: str) -> int:
    """Total hits for one target across non-excluded records (per-target
    scoring, independent of the primary criterion)."""
    return sum(
        1 for r in records if not r.excluded_reason and r.hits.get(criterion_id, False)
    )


# --- table export / import --------------------------------------------------

COLUMNS = ("series", "context", "runs", "successes", "failures", "success_rate")


def _row_json(row: SuccessRow) -> dict:
    return {
        "series": row.series,
        "context": row.context,
        "runs": row.runs,
        "successes": row.successes,
        "failures": row.failures,
        "success_rate": {
            "exact": f"{row.rate_exact.numerator}/{row.rate_exact.denominator}",
            "display_percent": row.rate_display,
        },
    }


def table_to_json(table: SuccessTable) -> str:
    return json.dumps({"columns": list(COLUMNS), "rows": [_row_json(r) for r in table.rows]},
                      ensure_ascii=False, indent=2)


def table_from_json(text: str) -> SuccessTable:
    data = json.loads(text)
    rows = []
    for r in data["rows"]:
        num, _, den = r["success_rate"]["exact"].partition("/")
        rows.append(
            SuccessRow(
                series=r["series"],
                context=r["context"],
                runs=r["runs"],
                successes=r["successes"],
                failures=r["failures"],
                rate_exact=Fraction(int(num), int(den)),
                rate_display=r["success_rate"]["display_percent"],
            )
        )
    return SuccessTable(rows=rows)


def table_to_csv(table: SuccessTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in table.rows:
        writer.writerow([r.series, r.context, r.runs, r.successes, r.failures, f"{r.rate_display}%"])
    return buf.getvalue()


def table_to_text(table: SuccessTable) -> str:
    lines = ["Series  Context  Runs  Successes  Failures  Success Rate"]
    for r in table.rows:
        lines.append(
            f"{r.series:<7} {r.context:<8} {r.runs:<5} {r.successes:<10} {r.failures:<9} {r.rate_display}%"
        )
    return "\n".join(lines) + "\n"


def export_table(table: SuccessTable, fmt: str, path: str | Path) -> None:
    if not table.rows:
        raise ValueError("cannot export an empty table")
    renderers = {"csv": table_to_csv, "json": table_to_json, "text": table_to_text}
    if fmt not in renderers:
        raise ValueError(f"unknown export format: {fmt!r}")
    try:
        Path(path).write_text(renderers[fmt](table), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write table to {path}: {exc}") from exc


# --- series configuration & persistence -------------------------------------


def load_series_configs(path: str | Path) -> list[SeriesConfig]:
    """Read one or more series configurations from a JSON config file."""
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except (OSError, ValueError) as exc:
        raise IoFailure(f"cannot read series config {path}: {exc}") from exc
    entries = data["series"] if isinstance(data, dict) else data
    configs = []
    base = Path(path).parent
    for entry in entries:
        backend = BackendDescriptor(
            mode=entry["backend"]["mode"],
            endpoint=entry["backend"].get("endpoint"),
            model_name=entry["backend"].get("model_name"),
            replay_store=_resolve(base, entry["backend"].get("replay_store")),
            rate_limit=entry["backend"].get("rate_limit", 60),
        )
        criteria = tuple(
            TargetCriterion(id=c["id"], phrase=c["phrase"], description=c.get("description", ""))
            for c in entry["criteria"]
        )
        configs.append(
            SeriesConfig(
                label=entry["label"],
                prompt_id=entry.get("prompt", "integrity-v1"),
                context_mode=entry.get("context", "full"),
                n_runs=entry["n_runs"],
                backend=backend,
                criteria=criteria,
                primary_criterion=entry.get("primary_criterion", criteria[0].id if criteria else ""),
                section=entry.get("section", "conclusions"),
                window=entry.get("window", 2),
                input_path=_resolve(base, entry.get("input")),
            )
        )
    return configs


def _resolve(base: Path, value: str | None) -> str | None:
    if value is None:
        return None
    p = Path(value)
    return str(p if p.is_absolute() else base / p)


def run_series_to_dir(cfg: SeriesConfig, out_dir: str | Path, attachment: str = "") -> list[RunRecord]:
    """Run a series and persist raw outputs plus an append-only record log."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def sink(i: int, raw: str) -> None:
        (out / f"run_{i:03d}.txt").write_text(raw, encoding="utf-8")

    try:
        records = run_series(cfg, attachment=attachment, sink=sink)
    except BackendFailure as exc:
        for r in getattr(exc, "partial_records", []):
            _append_record(out, r)
        raise
    log = out / "records.jsonl"
    with open(log, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")
    return records


def _append_record(out: Path, record: RunRecord) -> None:
    with open(out / "records.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")


def load_records(series_dir: str | Path) -> list[RunRecord]:
    log = Path(series_dir) / "records.jsonl"
    if not log.is_file():
        raise IoFailure(f"no run log found in {series_dir}")
    records = []
    for line in log.read_text("utf-8").splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        records.append(
            RunRecord(
                run_index=d["run_index"],
                timestamp=d["timestamp"],
                raw_ref=d["raw_ref"],
                parse_status=d["parse_status"],
                hits=d["hits"],
                excluded_reason=d.get("excluded_reason"),
            )
        )
    return records
