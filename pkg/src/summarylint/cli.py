"""Command-line entry point.

Exit-code contract (stable across subcommands): 0 clean, 1 error, 2 when
flags were raised.  Reports default to human-readable text; ``--format
json`` emits the canonical machine form.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import docmodel, evalharness, integrity, iuschema, linguistic
from .backends import BackendDescriptor, make_backend
from .docmodel import SectionKind
from .errors import SummarylintError

EXIT_CLEAN = 0
EXIT_ERROR = 1
EXIT_FLAGS = 2


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_ERROR)


def _read_input(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        _fail(f"input file not found: {path}")
    return p.read_text("utf-8")


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _backend_from_flags(backend: str, replay_store: str | None, endpoint: str | None, model: str | None):
    try:
        descriptor = BackendDescriptor(
            mode=backend,
            endpoint=endpoint,
            model_name=model,
            replay_store=replay_store,
        )
        return make_backend(descriptor)
    except (ValueError, SummarylintError) as exc:
        _fail(str(exc))


backend_options = [
    click.option("--backend", type=click.Choice(["heuristic", "replay", "live"]), default="heuristic", show_default=True),
    click.option("--replay-store", type=click.Path(), default=None, help="Replay store directory (replay backend)."),
    click.option("--endpoint", default=None, help="Chat-completion endpoint URL (live backend)."),
    click.option("--model", default=None, help="Model name (live backend)."),
]


def _with_backend_options(fn):
    for opt in reversed(backend_options):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option()
def main():
    """Manuscript summary analysis: claim integrity, pronoun clarity, eval."""


@main.group()
def analyze():
    """Run an analysis over a manuscript or summary section."""


@analyze.command("sections")
@click.argument("file", type=click.Path())
@click.option("--input-format", type=click.Choice(["plain", "markdown"]), default="markdown", show_default=True)
@click.option("--output", type=click.Path(), default=None)
def analyze_sections(file, input_format, output):
    """Emit the parsed section map as JSON."""
    text = _read_input(file)
    try:
        m = docmodel.parse_manuscript(text, format_hint=input_format, source_id=file)
    except SummarylintError as exc:
        _fail(str(exc))
    _emit(docmodel.manuscript_to_json(m) + "\n", output)
    sys.exit(EXIT_CLEAN)


@analyze.command("integrity")
@click.argument("file", type=click.Path())
@click.option("--section", type=click.Choice(["abstract", "conclusions"]), default="conclusions", show_default=True)
@click.option("--input-format", type=click.Choice(["plain", "markdown"]), default="markdown", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--output", type=click.Path(), default=None)
@_with_backend_options
def analyze_integrity(file, section, input_format, fmt, output, backend, replay_store, endpoint, model):
    """Flag unsubstantiated claims in a summary section."""
    text = _read_input(file)
    be = _backend_from_flags(backend, replay_store, endpoint, model)
    target = SectionKind(section)
    try:
        m = docmodel.parse_manuscript(text, format_hint=input_format, source_id=file)
        report = integrity.run_integrity_workflow(m, target, backend=be if backend != "heuristic" else None)
    except SummarylintError as exc:
        _fail(str(exc))
    rendered = report.to_json() + "\n" if fmt == "json" else report.render_text()
    _emit(rendered, output)
    sys.exit(EXIT_FLAGS if report.flags else EXIT_CLEAN)


@analyze.command("pronouns")
@click.argument("file", type=click.Path())
@click.option("--context", "context_mode", type=click.Choice(["limited", "full"]), default="limited", show_default=True)
@click.option("--section", type=click.Choice(["abstract", "conclusions"]), default="conclusions", show_default=True)
@click.option("--window", type=int, default=linguistic.DEFAULT_WINDOW, show_default=True, help="Antecedent window in sentences.")
@click.option("--input-format", type=click.Choice(["plain", "markdown"]), default="markdown", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--output", type=click.Path(), default=None)
@_with_backend_options
def analyze_pronouns(file, context_mode, section, window, input_format, fmt, output, backend, replay_store, endpoint, model):
    """Flag semantically ambiguous pronouns in a summary section."""
    text = _read_input(file)
    be = _backend_from_flags(backend, replay_store, endpoint, model)
    target = SectionKind(section)
    try:
        try:
            source = docmodel.parse_manuscript(text, format_hint=input_format, source_id=file)
        except docmodel.NoHeadingsFound:
            if context_mode == "full":
                raise
            source = docmodel.section_as_lone(target, text)
        if context_mode == "full" and isinstance(source, docmodel.Manuscript) and not source.has_imrad_content():
            _fail("full context mode requires a manuscript with IMRaD sections")
        findings = linguistic.run_linguistic_workflow(
            source,
            context_mode=context_mode,
            backend=be if backend != "heuristic" else None,
            window=window,
            target=target,
        )
    except SummarylintError as exc:
        _fail(str(exc))
    if fmt == "json":
        rendered = linguistic.findings_to_json(findings) + "\n"
    else:
        rendered = linguistic.render_findings_text(findings)
    _emit(rendered, output)
    flagged = any(f.verdict is linguistic.Verdict.AMBIGUOUS for f in findings)
    sys.exit(EXIT_FLAGS if flagged else EXIT_CLEAN)


@main.group("schema")
def schema_group():
    """Inspect or export the 13-category classification schema."""


@schema_group.command("export")
@click.option("--output", type=click.Path(), required=True)
def schema_export(output):
    """Write the category schema asset as JSON."""
    try:
        iuschema.export_schema(output)
    except (OSError, SummarylintError) as exc:
        _fail(str(exc))
    sys.exit(EXIT_CLEAN)


@main.group("eval")
def eval_group():
    """Run and report repeated-run evaluation series."""


@eval_group.command("run")
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.option("--out", "out_dir", type=click.Path(), default="eval-out", show_default=True)
def eval_run(config_path, out_dir):
    """Execute every series in a config file; write run logs and tables."""
    if not Path(config_path).is_file():
        _fail(f"config file not found: {config_path}")
    try:
        configs = evalharness.load_series_configs(config_path)
    except (SummarylintError, KeyError, ValueError) as exc:
        _fail(f"invalid series config: {exc}")
    table = evalharness.SuccessTable()
    out_root = Path(out_dir)
    try:
        for cfg in configs:
            series_dir = out_root / f"{cfg.label}_{cfg.context_mode}"
            records = evalharness.run_series_to_dir(cfg, series_dir)
            row = evalharness.summarize(
                records, cfg.primary_criterion, series=cfg.label, context=cfg.context_mode
            )
            table.rows.append(row)
    except SummarylintError as exc:
        _fail(str(exc))
    out_root.mkdir(parents=True, exist_ok=True)
    evalharness.export_table(table, "csv", out_root / "success_table.csv")
    evalharness.export_table(table, "json", out_root / "success_table.json")
    click.echo(evalharness.table_to_text(table), nl=False)
    sys.exit(EXIT_CLEAN)


@eval_group.command("report")
@click.option("--series", "series_dir", type=click.Path(), required=True)
@click.option("--primary", "primary_criterion", required=True, help="Primary criterion id to score.")
@click.option("--label", default="", help="Series label for the table row.")
@click.option("--context", "context_mode", default="", help="Context label for the table row.")
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text", show_default=True)
@click.option("--output", type=click.Path(), default=None)
def eval_report(series_dir, primary_criterion, label, context_mode, fmt, output):
    """Summarize an existing series run log into a success table."""
    try:
        records = evalharness.load_records(series_dir)
        row = evalharness.summarize(records, primary_criterion, series=label, context=context_mode)
    except SummarylintError as exc:
        _fail(str(exc))
    table = evalharness.SuccessTable(rows=[row])
    renderers = {
        "text": evalharness.table_to_text,
        "csv": evalharness.table_to_csv,
        "json": evalharness.table_to_json,
    }
    _emit(renderers[fmt](table), output)
    sys.exit(EXIT_CLEAN)


if __name__ == "__main__":
    main()
