import json

from click.testing import CliRunner

from conftest import random_store
from ecbw.cli import main


def run_config_file(tmp_path, **overrides):
    config = {
        "strategy": "ecbw",
        "target_idea_count": 45,
        "family_count": 12,
        "seed": 5,
        "replicates": 1,
    }
    config.update(overrides)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


class TestSimulate:
    def test_produces_log_and_trace(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        result = runner.invoke(
            main, ["simulate", str(run_config_file(tmp_path)), str(out)]
        )
        assert result.exit_code == 0, result.output
        assert (out / "run_seed5.log.jsonl").exists()
        assert (out / "run_seed5.quality.jsonl").exists()

    def test_repeat_runs_identical(self, tmp_path):
        runner = CliRunner()
        config = run_config_file(tmp_path)
        first, second = tmp_path / "a", tmp_path / "b"
        assert runner.invoke(main, ["simulate", str(config), str(first)]).exit_code == 0
        assert runner.invoke(main, ["simulate", str(config), str(second)]).exit_code == 0
        assert (first / "run_seed5.log.jsonl").read_bytes() == (
            second / "run_seed5.log.jsonl"
        ).read_bytes()

    def test_replicates_emit_one_log_each(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        config = run_config_file(tmp_path, replicates=3)
        assert runner.invoke(main, ["simulate", str(config), str(out)]).exit_code == 0
        assert len(list(out.glob("*.log.jsonl"))) == 3

    def test_bad_config_exits_2(self, tmp_path):
        runner = CliRunner()
        config = run_config_file(tmp_path, ideas_per_session=4)
        result = runner.invoke(main, ["simulate", str(config), str(tmp_path / "o")])
        assert result.exit_code == 2

    def test_missing_config_exits_3(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(
            main, ["simulate", str(tmp_path / "nope.json"), str(tmp_path / "o")]
        )
        assert result.exit_code == 3


class TestAnalyze:
    def test_emits_reports(self, tmp_path):
        store = random_store(40, n_ideas=120, vote_sessions=60)
        log = tmp_path / "log.jsonl"
        store.save(log)
        out = tmp_path / "reports"
        runner = CliRunner()
        result = runner.invoke(main, ["analyze", str(log), str(out)])
        assert result.exit_code == 0, result.output
        names = sorted(p.name for p in out.iterdir())
        assert names == [
            "family_report.csv",
            "generation_traces.csv",
            "isr_histogram.csv",
            "parent_offspring_joint.csv",
            "parent_offspring_transition.csv",
            "summary.json",
            "windowed_mean_isr.csv",
        ]

    def test_corrupt_log_exits_3(self, tmp_path):
        log = tmp_path / "bad.jsonl"
        log.write_text("not json\n", encoding="utf-8")
        result = CliRunner().invoke(main, ["analyze", str(log), str(tmp_path / "o")])
        assert result.exit_code == 3
        assert "error" in result.output


class TestExport:
    def test_row_count_matches_idea_events(self, tmp_path):
        store = random_store(41, n_ideas=80, vote_sessions=20)
        log = tmp_path / "log.jsonl"
        store.save(log)
        idea_events = sum(
            1
            for line in log.read_text().splitlines()
            if json.loads(line)["kind"] == "idea"
        )
        assert idea_events == 80
        runner = CliRunner()
        result = runner.invoke(main, ["export", str(log)])
        assert result.exit_code == 0
        rows = result.output.splitlines()
        assert len(rows) == 81  # header plus one row per idea

    def test_output_file(self, tmp_path):
        store = random_store(42, n_ideas=40, vote_sessions=10)
        log = tmp_path / "log.jsonl"
        store.save(log)
        out = tmp_path / "table.csv"
        result = CliRunner().invoke(main, ["export", str(log), "-o", str(out)])
        assert result.exit_code == 0
        assert out.exists()

    def test_missing_log_exits_3(self, tmp_path):
        result = CliRunner().invoke(main, ["export", str(tmp_path / "none.jsonl")])
        assert result.exit_code == 3


class TestServe:
    def test_bad_service_config_exits_2(self, tmp_path):
        config = tmp_path / "service.json"
        config.write_text('{"no_store": true}', encoding="utf-8")
        result = CliRunner().invoke(main, ["serve", str(config)])
        assert result.exit_code == 2

    def test_missing_service_config_exits_3(self, tmp_path):
        result = CliRunner().invoke(main, ["serve", str(tmp_path / "none.json")])
        assert result.exit_code == 3
