import json
from fractions import Fraction

import pytest

from conftest import (
    LINGUISTIC_FAILURE,
    LINGUISTIC_SUCCESS,
    integrity_transcript,
    linguistic_transcripts,
    write_store,
)
from summarylint import evalharness
from summarylint.backends import BackendDescriptor, ParsedReport
from summarylint.errors import EmptySeries, ReplayExhausted
from summarylint.evalharness import (
    RunRecord,
    SeriesConfig,
    SuccessTable,
    TargetCriterion,
    criterion_hits,
    display_rate,
    load_records,
    run_series,
    run_series_to_dir,
    score_run,
    summarize,
    table_from_json,
    table_to_csv,
    table_to_json,
    table_to_text,
)

CRIT_90ML = TargetCriterion(id="out-qty", phrase="90 mL of H₂¹⁷O")
CRIT_40FOLD = TargetCriterion(id="enrich", phrase="40-fold enriched water")
CRIT_PRONOUN = TargetCriterion(id="concept", phrase="power of ¹⁷O NMR")


def _series(store, n_runs, prompt_id="linguistic-v1", criteria=(CRIT_PRONOUN,), context="limited"):
    return SeriesConfig(
        label="S",
        prompt_id=prompt_id,
        context_mode=context,
        n_runs=n_runs,
        backend=BackendDescriptor(mode="replay", replay_store=str(store)),
        criteria=tuple(criteria),
        primary_criterion=criteria[0].id,
    )


class TestDisplayRate:
    # oracle: hand-computed half-up-to-nearest-5 rounding of the exact percent
    @pytest.mark.parametrize(
        "successes,runs,expected",
        [
            (12, 21, 55),  # 57.14% -> 55
            (7, 20, 35),
            (11, 20, 55),
            (14, 20, 70),
            (17, 20, 85),
            (18, 20, 90),
            (20, 20, 100),
            (17, 19, 90),  # 89.47% -> 90
            (16, 20, 80),
            (0, 20, 0),
            (1, 40, 5),  # 2.5% rounds half-up to 5
            (21, 40, 55),  # 52.5% rounds half-up to 55
            (35, 40, 90),  # 87.5% rounds half-up to 90
        ],
    )
    def test_values(self, successes, runs, expected):
        assert display_rate(successes, runs) == expected

    def test_rejects_zero_runs(self):
        with pytest.raises(ValueError):
            display_rate(0, 0)


class TestScoreRun:
    def test_parse_failure_scores_all_misses(self):
        hits = score_run(None, (CRIT_90ML, CRIT_40FOLD))
        assert hits == {"out-qty": False, "enrich": False}

    def test_phrase_match_is_token_based(self):
        parsed = ParsedReport(kind="integrity_report", flags=["90 mL of H₂¹⁷O"])
        assert score_run(parsed, (CRIT_90ML, CRIT_40FOLD)) == {
            "out-qty": True,
            "enrich": False,
        }

    def test_flag_with_extra_words_still_hits(self):
        parsed = ParsedReport(
            kind="integrity_report", flags=["the quantity 90 mL of H₂¹⁷O reported"]
        )
        assert score_run(parsed, (CRIT_90ML,))["out-qty"]


class TestSeriesConfig:
    def test_zero_runs_rejected(self, tmp_path):
        store = write_store(tmp_path / "s", ["x\n"])
        with pytest.raises(EmptySeries):
            _series(store, 0)

    def test_no_criteria_rejected(self, tmp_path):
        store = write_store(tmp_path / "s", ["x\n"])
        with pytest.raises(EmptySeries):
            SeriesConfig(
                label="S",
                prompt_id="integrity-v1",
                context_mode="full",
                n_runs=1,
                backend=BackendDescriptor(mode="replay", replay_store=str(store)),
                criteria=(),
            )

    def test_expected_kind(self, tmp_path):
        store = write_store(tmp_path / "s", ["x\n"])
        assert _series(store, 1).expected_kind == "linguistic_report"
        assert (
            _series(store, 1, prompt_id="integrity-v1", criteria=(CRIT_90ML,)).expected_kind
            == "integrity_report"
        )


class TestRunSeries:
    def test_runs_exactly_n(self, tmp_path):
        store = write_store(tmp_path / "s", linguistic_transcripts(5, 3))
        records = run_series(_series(store, 5))
        assert [r.run_index for r in records] == list(range(5))
        assert [r.hits["concept"] for r in records] == [True, True, True, False, False]

    def test_exhausted_store_aborts_with_partials(self, tmp_path):
        store = write_store(tmp_path / "s", linguistic_transcripts(2, 2))
        with pytest.raises(ReplayExhausted) as excinfo:
            run_series(_series(store, 4))
        assert len(excinfo.value.partial_records) == 2

    def test_excluded_reason_recorded(self, tmp_path):
        store = write_store(
            tmp_path / "s",
            linguistic_transcripts(3, 3),
            excluded={1: "incorrect model version"},
        )
        records = run_series(_series(store, 3))
        assert [r.excluded_reason for r in records] == [
            None,
            "incorrect model version",
            None,
        ]

    def test_empty_transcript_is_parse_failure_run(self, tmp_path):
        store = write_store(tmp_path / "s", [LINGUISTIC_SUCCESS, "\n"])
        records = run_series(_series(store, 2))
        assert [r.parse_status for r in records] == ["ok", "parse_failure"]
        assert records[1].hits == {"concept": False}


class TestSummarize:
    def _records(self, hits, excluded=()):
        return [
            RunRecord(
                run_index=i,
                timestamp=0.0,
                raw_ref=None,
                parse_status="ok",
                hits={"t": h},
                excluded_reason="x" if i in excluded else None,
            )
            for i, h in enumerate(hits)
        ]

    def test_counts_and_exact_fraction(self):
        row = summarize(self._records([True] * 12 + [False] * 9), "t", series="A", context="Full")
        assert (row.runs, row.successes, row.failures) == (21, 12, 9)
        assert row.rate_exact == Fraction(12, 21)
        assert row.rate_display == 55

    def test_excluded_runs_omitted_everywhere(self):
        # 20 recorded runs, one excluded, 17 of the counted 19 succeed
        hits = [True] * 17 + [False] * 2 + [True]
        row = summarize(self._records(hits, excluded={19}), "t")
        assert (row.runs, row.successes, row.failures) == (19, 17, 2)
        assert row.rate_display == 90

    def test_empty_records_raise(self):
        with pytest.raises(EmptySeries):
            summarize([], "t")

    def test_all_excluded_raise(self):
        with pytest.raises(EmptySeries):
            summarize(self._records([True, True], excluded={0, 1}), "t")

    def test_criterion_hits_skips_excluded(self):
        records = self._records([True, True, False], excluded={1})
        assert criterion_hits(records, "t") == 1


class TestTables:
    def _table(self):
        records = [
            RunRecord(i, 0.0, None, "ok", {"t": i < 12}) for i in range(21)
        ]
        return SuccessTable(rows=[summarize(records, "t", series="A", context="Full")])

    def test_json_round_trip(self):
        table = self._table()
        again = table_from_json(table_to_json(table))
        assert again.rows == table.rows
        data = json.loads(table_to_json(table))
        assert data["columns"] == list(evalharness.COLUMNS)
        assert data["rows"][0]["success_rate"] == {"exact": "4/7", "display_percent": 55}

    def test_csv_layout(self):
        text = table_to_csv(self._table())
        lines = text.strip().splitlines()
        assert lines[0] == "series,context,runs,successes,failures,success_rate"
        assert lines[1] == "A,Full,21,12,9,55%"

    def test_text_layout(self):
        text = table_to_text(self._table())
        assert "Success Rate" in text and "55%" in text

    def test_export_rejects_empty_table(self, tmp_path):
        with pytest.raises(ValueError):
            evalharness.export_table(SuccessTable(), "csv", tmp_path / "t.csv")

    def test_export_writes_file(self, tmp_path):
        out = tmp_path / "t.csv"
        evalharness.export_table(self._table(), "csv", out)
        assert out.read_text("utf-8") == table_to_csv(self._table())


class TestPersistence:
    def test_run_series_to_dir_writes_raw_and_log(self, tmp_path):
        store = write_store(tmp_path / "s", linguistic_transcripts(3, 2))
        out = tmp_path / "series"
        records = run_series_to_dir(_series(store, 3), out)
        assert sorted(p.name for p in out.glob("run_*.txt")) == [
            "run_000.txt",
            "run_001.txt",
            "run_002.txt",
        ]
        assert (out / "run_000.txt").read_text("utf-8") == LINGUISTIC_SUCCESS
        assert (out / "run_002.txt").read_text("utf-8") == LINGUISTIC_FAILURE
        reloaded = load_records(out)
        assert [r.hits for r in reloaded] == [r.hits for r in records]

    def test_summaries_identical_after_reload(self, tmp_path):
        store = write_store(tmp_path / "s", linguistic_transcripts(4, 3))
        out = tmp_path / "series"
        records = run_series_to_dir(_series(store, 4), out)
        assert summarize(load_records(out), "concept") == summarize(records, "concept")


class TestConfigLoading:
    def test_load_series_configs_resolves_paths(self, tmp_path):
        store = write_store(tmp_path / "store", linguistic_transcripts(2, 2))
        (tmp_path / "doc.md").write_text("# Conclusions\n\nText.\n", "utf-8")
        config = {
            "series": [
                {
                    "label": "A",
                    "prompt": "linguistic-v1",
                    "context": "limited",
                    "n_runs": 2,
                    "backend": {"mode": "replay", "replay_store": "store"},
                    "criteria": [{"id": "concept", "phrase": "power of ¹⁷O NMR"}],
                    "input": "doc.md",
                }
            ]
        }
        cfg_path = tmp_path / "eval.json"
        cfg_path.write_text(json.dumps(config), "utf-8")
        (cfg,) = evalharness.load_series_configs(cfg_path)
        assert cfg.backend.replay_store == str(tmp_path / "store")
        assert cfg.input_path == str(tmp_path / "doc.md")
        assert cfg.primary_criterion == "concept"
        records = run_series(cfg)
        assert summarize(records, "concept").rate_display == 100
