import json
import random

import pytest

from cqscore import (
    ConsistencyError,
    InvalidInputError,
    MethodRun,
    ScoreRecord,
    aggregate,
    generate_suite,
    load_suite,
    write_suite,
)
from cqscore import report
from cqscore.parsing import parse_prompt


def make_run(name, cqs, extras=None):
    records = [
        ScoreRecord(f"p{i}", cq * 0.9, cq * 1.1 if cq * 1.1 <= 1 else 1.0, cq, (extras or {}).get(i, {}))
        for i, cq in enumerate(cqs)
    ]
    return MethodRun(name, records)


class TestGenerateSuite:
    def test_type1(self, lex):
        suite = generate_suite("type1", ["sheep"], 4, lex=lex)
        texts = [p.text for p in suite.prompts]
        assert texts == [
            "A sheep on the prairie",
            "Two sheep on the prairie",
            "Three sheep on the prairie",
            "Four sheep on the prairie",
        ]
        assert suite.prompts[3].truth.entries == {"sheep": 4}

    def test_type3_step3(self, lex):
        suite = generate_suite("type3", ["horse", "cattle", "sheep", "man"], 3, lex=lex)
        assert suite.prompts[2].text == "Three horses, three cattle and three sheep on the prairie"
        assert suite.prompts[2].truth.entries == {"horse": 3, "cattle": 3, "sheep": 3}

    def test_type2_degenerate(self, lex):
        suite = generate_suite("type2", ["dog"], 1, lex=lex)
        assert len(suite.prompts) == 1
        assert list(suite.prompts[0].truth.entries) == ["dog"]

    def test_round_trip_invariant(self, lex):
        for kind in ("type1", "type2", "type3"):
            suite = generate_suite(kind, ["horse", "cattle", "sheep", "man"], 4, seed=9, lex=lex)
            for spec in suite.prompts:
                assert parse_prompt(spec.text, lex).entries == spec.truth.entries

    def test_deterministic(self, lex):
        a = generate_suite("type2", ["dog", "cat", "bird"], 3, seed=5, lex=lex)
        b = generate_suite("type2", ["dog", "cat", "bird"], 3, seed=5, lex=lex)
        assert [p.text for p in a.prompts] == [p.text for p in b.prompts]

    def test_max_n_exceeding_categories(self, lex):
        with pytest.raises(InvalidInputError):
            generate_suite("type3", ["dog"], 2, lex=lex)

    def test_unknown_kind(self, lex):
        with pytest.raises(InvalidInputError):
            generate_suite("type9", ["dog"], 1, lex=lex)

    def test_suite_file_round_trip(self, tmp_path, lex):
        suite = generate_suite("type1", ["sheep"], 3, seed=2, composition_tag="awkward", lex=lex)
        path = tmp_path / "suite.jsonl"
        write_suite(suite, path)
        loaded = load_suite(path)
        assert loaded.suite_kind == suite.suite_kind
        assert loaded.composition_tag == "awkward"
        assert [p.text for p in loaded.prompts] == [p.text for p in suite.prompts]
        assert [p.truth.entries for p in loaded.prompts] == [p.truth.entries for p in suite.prompts]


class TestAggregate:
    def test_single_method_mean(self):
        table = aggregate([make_run("m", [0.5, 0.7])])
        assert table.rows[0]["cq"] == pytest.approx(0.6, abs=1e-12)

    def test_dominance_ranks_first(self):
        a = make_run("A", [0.9, 0.8, 0.7])
        b = make_run("B", [0.5, 0.4, 0.3])
        table = aggregate([b, a])
        assert [r["method"] for r in table.rows] == ["A", "B"]
        assert table.best["cq"] == "A"

    def test_constant_column_mean(self):
        table = aggregate([make_run("m", [0.751316] * 5)])
        assert table.rows[0]["cq"] == pytest.approx(0.751316, abs=1e-12)

    def test_permutation_leaves_means_unchanged(self):
        rng = random.Random(3)
        cqs = [rng.random() for _ in range(20)]
        run = make_run("m", cqs)
        shuffled = MethodRun("m", random.Random(4).sample(run.records, len(run.records)))
        assert aggregate([run]).rows[0]["cq"] == pytest.approx(
            aggregate([shuffled]).rows[0]["cq"], abs=1e-12
        )

    def test_mismatched_coverage_rejected(self):
        a = make_run("A", [0.5, 0.6])
        b = MethodRun("B", make_run("B", [0.5, 0.6, 0.7]).records)
        with pytest.raises(ConsistencyError, match="p2"):
            aggregate([a, b])

    def test_external_columns_pass_through(self):
        a = make_run("A", [0.6, 0.8], extras={0: {"clip": 13.0, "fid": 19.0}, 1: {"clip": 14.0, "fid": 18.0}})
        b = make_run("B", [0.5, 0.5], extras={0: {"clip": 15.0, "fid": 20.0}, 1: {"clip": 15.0, "fid": 21.0}})
        table = aggregate([a, b])
        row_a = next(r for r in table.rows if r["method"] == "A")
        assert row_a["clip"] == pytest.approx(13.5)
        assert table.best["clip"] == "B"  # higher is better
        assert table.best["fid"] == "A"  # lower is better

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            aggregate([])


class TestReport:
    def make_table(self):
        a = make_run("A", [0.9, 0.8], extras={0: {"clip": 13.0}, 1: {"clip": 14.0}})
        b = make_run("B", [0.5, 0.4], extras={0: {"clip": 15.0}, 1: {"clip": 16.0}})
        return aggregate([a, b])

    def test_tsv_marks_best_and_round_trips(self):
        table = self.make_table()
        tsv = report.to_tsv(table)
        lines = tsv.strip().split("\n")
        assert lines[0].split("\t") == ["method", "n", "cq", "acc", "aqc", "clip"]
        first = lines[1].split("\t")
        assert first[0] == "A"
        assert first[2].endswith("*")
        assert float(first[2].rstrip("*")) == table.rows[0]["cq"]

    def test_json_layout(self):
        table = self.make_table()
        payload = json.loads(report.to_json(table))
        assert payload["best"]["cq"] == "A"
        assert payload["rows"][0]["method"] == "A"
        assert payload["rows"][0]["cq"] == table.rows[0]["cq"]

    def test_markdown(self):
        md = report.to_markdown(self.make_table())
        assert md.startswith("| Method | cq ↑ |")
        assert "**" in md
        assert "fid" not in md

    def test_figure_written(self, tmp_path):
        path = tmp_path / "metrics.png"
        report.render_figure(self.make_table(), path)
        assert path.stat().st_size > 0
