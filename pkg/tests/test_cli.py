import csv
import json

import pytest
from click.testing import CliRunner

from askgraph.cli import main
from askgraph.config import fixture_path
from askgraph.report import write_report

Q_RUNNING = (
    "Name the sea into which Danish Straits flows and has Kaliningrad"
    " as one of the city on the shore"
)


@pytest.fixture
def runner():
    return CliRunner()


class TestAnswerCommand:
    def test_running_example_against_bundled_fixture(self, runner):
        result = runner.invoke(main, ["answer", Q_RUNNING, "--endpoint", "fixture"])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert lines[0] == "http://dbpedia.org/resource/Baltic_Sea"
        assert sum(1 for l in lines if l.startswith("http://")) == 1

    def test_full_json_payload(self, runner):
        result = runner.invoke(
            main, ["answer", Q_RUNNING, "--endpoint", "fixture", "--full"]
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["plans"][0]["rank"] == 1

    def test_against_live_server_flag(self, runner, dbpedia_server):
        result = runner.invoke(
            main,
            [
                "answer",
                "Who is the author of Dracula?",
                "--endpoint",
                dbpedia_server.url,
                "--embeddings",
                fixture_path("embeddings.txt"),
            ],
        )
        assert result.exit_code == 0
        assert "http://dbpedia.org/resource/Bram_Stoker" in result.output

    def test_flag_overrides_parameters(self, runner):
        result = runner.invoke(
            main,
            ["answer", Q_RUNNING, "--endpoint", "fixture", "--max-queries", "1", "--full"],
        )
        payload = json.loads(result.output)
        assert len(payload["plans"]) == 1

    def test_error_message_on_unreachable_endpoint(self, runner):
        result = runner.invoke(
            main,
            [
                "answer",
                Q_RUNNING,
                "--endpoint",
                "http://127.0.0.1:1/sparql",
                "--timeout",
                "0.2",
            ],
        )
        assert result.exit_code != 0
        assert "linking" in result.stderr


class TestBenchCommand:
    def test_writes_report_csv_and_figures(self, runner, tmp_path):
        out_dir = tmp_path / "report"
        result = runner.invoke(
            main,
            [
                "bench",
                fixture_path("benchmark.json"),
                "--endpoint",
                "fixture",
                "--out",
                str(out_dir),
            ],
        )
        assert result.exit_code == 0, result.output
        assert "macro P=0.7000 R=0.8000 F1=0.7333" in result.output
        report = json.loads((out_dir / "report.json").read_text())
        assert report["macro"]["f1"] == pytest.approx(11 / 15, abs=1e-9)
        with open(out_dir / "per_question.csv") as handle:
            rows = list(csv.reader(handle))
        assert rows[0][0] == "question"
        assert len(rows) == 1 + 5
        assert (out_dir / "metrics.png").stat().st_size > 0
        assert (out_dir / "timings.png").stat().st_size > 0


class TestConfigFile:
    def test_config_file_smoke(self, runner, tmp_path):
        config = tmp_path / "askgraph.conf"
        config.write_text("endpoint=fixture\nmax_queries=3\n")
        result = runner.invoke(
            main, ["answer", Q_RUNNING, "--config", str(config), "--full"]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert len(payload["plans"]) == 3


class TestReportWriter:
    def test_report_paths(self, tmp_path):
        report = {
            "per_question": [
                {"question": "q1", "p": 1.0, "r": 1.0, "f1": 1.0, "predicted": ["a"]},
                {"question": "q2", "p": 0.0, "r": 0.0, "f1": 0.0, "predicted": [], "error": "x"},
            ],
            "macro": {"p": 0.5, "r": 0.5, "f1": 0.5},
            "mean_timings": {"qu": 0.01, "linking": 0.02, "execution_filtration": 0.03},
            "questions": 2,
        }
        paths = write_report(report, str(tmp_path / "out"))
        for path in paths.values():
            assert (tmp_path / "out").exists()
        loaded = json.loads((tmp_path / "out" / "report.json").read_text())
        assert loaded == report
