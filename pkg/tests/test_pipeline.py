import json
from fractions import Fraction

import pytest

from askgraph.config import build_config, fixture_path, load_config, merge_settings
from askgraph.errors import ConfigError, MalformedBenchmark, PhaseError
from askgraph.pipeline import (
    answer_question,
    default_embeddings,
    live_endpoint,
    run_benchmark,
)

Q_RUNNING = (
    "Name the sea into which Danish Straits flows and has Kaliningrad"
    " as one of the city on the shore"
)


@pytest.fixture
def cfg(dbpedia_server):
    return load_config(
        flags={
            "endpoint": dbpedia_server.url,
            "embeddings": fixture_path("embeddings.txt"),
            "max_retries": 0,
        },
        environ={},
    )


class TestAnswerQuestion:
    def test_running_example(self, cfg, store):
        result = answer_question(Q_RUNNING, cfg, store)
        values = [a.term.value for a in result.answers.answers]
        assert values == ["http://dbpedia.org/resource/Baltic_Sea"]
        assert result.prediction.data_type == "string"
        assert result.prediction.semantic_type == "sea"
        rank1 = result.plans[0]
        assert "<http://dbpedia.org/property/outflow>" in rank1.sparql
        assert "<http://dbpedia.org/ontology/nearestCity>" in rank1.sparql

    def test_phase_timings_sum_to_total(self, cfg, store):
        result = answer_question(Q_RUNNING, cfg, store)
        phases = ("qu", "linking", "execution_filtration")
        sum_phases = sum(result.timings[p] for p in phases)
        assert result.timings["total"] >= sum_phases
        assert result.timings["total"] == pytest.approx(sum_phases, abs=0.05)

    def test_boolean_question(self, cfg, store):
        result = answer_question("Is Berlin the capital of Germany?", cfg, store)
        assert result.prediction.data_type == "boolean"
        assert len(result.answers.answers) == 1
        assert result.answers.answers[0].term.value == "true"
        assert result.plans[0].form == "ask"

    def test_date_question(self, cfg, store):
        result = answer_question("When did the Boston Tea Party take place?", cfg, store)
        values = [a.term.value for a in result.answers.answers]
        assert values == ["1773-12-16"]
        dropped_reasons = {reason for _, reason in result.answers.dropped}
        assert dropped_reasons == {"dtype_mismatch"}

    def test_numeric_question(self, cfg, store):
        result = answer_question(
            "How many students does Concordia University have?", cfg, store
        )
        assert [a.term.value for a in result.answers.answers] == ["46829"]

    def test_unreachable_endpoint_fails_in_linking(self, store):
        cfg = load_config(
            flags={
                "endpoint": "http://127.0.0.1:1/sparql",
                "embeddings": fixture_path("embeddings.txt"),
                "max_retries": 0,
                "timeout": 0.2,
            },
            environ={},
        )
        with pytest.raises(PhaseError) as info:
            answer_question(Q_RUNNING, cfg, store)
        assert info.value.phase == "linking"

    def test_unanswerable_question_fails_in_linking(self, cfg, store):
        with pytest.raises(PhaseError) as info:
            answer_question("Who is the author of Middlemarch?", cfg, store)
        assert info.value.phase == "linking"

    def test_repeat_runs_identical(self, cfg, store):
        first = answer_question(Q_RUNNING, cfg, store)
        second = answer_question(Q_RUNNING, cfg, store)
        assert [a.term for a in first.answers.answers] == [
            a.term for a in second.answers.answers
        ]
        assert [p.sparql for p in first.plans] == [p.sparql for p in second.plans]


class TestRunBenchmark:
    def test_fixture_benchmark_macro_matches_hand_computation(self, cfg, store):
        report = run_benchmark(fixture_path("benchmark.json"), cfg, store)
        # by hand over the fixture's known answer sets:
        #   running example     -> (1, 1, 1)
        #   Dracula author      -> ({Bram_Stoker, "Dracula"} vs {Bram_Stoker})
        #                          = (1/2, 1, 2/3)
        #   Boston Tea Party    -> (1, 1, 1)
        #   Concordia students  -> (1, 1, 1)
        #   Middlemarch         -> unanswerable: (0, 0, 0)
        macro = report["macro"]
        assert macro["p"] == pytest.approx(float(Fraction(7, 10)), abs=1e-12)
        assert macro["r"] == pytest.approx(float(Fraction(4, 5)), abs=1e-12)
        assert macro["f1"] == pytest.approx(float(Fraction(11, 15)), abs=1e-12)
        assert report["questions"] == 5
        failures = [e for e in report["per_question"] if "error" in e]
        assert len(failures) == 1
        assert "Middlemarch" in failures[0]["question"]
        assert failures[0]["p"] == failures[0]["r"] == failures[0]["f1"] == 0.0

    def test_mean_timings_present(self, cfg, store):
        report = run_benchmark(fixture_path("benchmark.json"), cfg, store)
        for phase in ("qu", "linking", "execution_filtration"):
            assert report["mean_timings"][phase] >= 0

    def test_empty_benchmark_rejected(self, cfg, store, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("[]")
        with pytest.raises(MalformedBenchmark):
            run_benchmark(str(path), cfg, store)


class TestConfig:
    def test_defaults(self, dbpedia_server):
        cfg = load_config(flags={"endpoint": dbpedia_server.url}, environ={})
        assert cfg.linker.max_fetched_vertices == 400
        assert cfg.linker.vertices_per_node == 1
        assert cfg.linker.predicates_per_edge == 20
        assert cfg.linker.predicates_per_vertex_limit == 100
        assert cfg.K == 40
        assert cfg.tau == 0.5
        assert cfg.parallelism == 4
        assert cfg.qu.kind == "offline_extractor"

    def test_precedence_file_env_flags(self, tmp_path, dbpedia_server):
        config_file = tmp_path / "askgraph.conf"
        config_file.write_text(
            "# comment\n"
            f"endpoint={dbpedia_server.url}\n"
            "tau=0.9\n"
            "max_queries=10\n"
        )
        env = {"ASKGRAPH_TAU": "0.7"}
        cfg = load_config(str(config_file), flags={"max_queries": 5}, environ=env)
        assert cfg.tau == 0.7        # env beats file
        assert cfg.K == 5            # flag beats file
        assert cfg.endpoint.url == dbpedia_server.url

    def test_request_overrides_beat_flags(self, dbpedia_server):
        cfg = load_config(flags={"endpoint": dbpedia_server.url, "tau": 0.4}, environ={})
        overridden = cfg.apply_overrides({"tau": 0.9, "k_vertices": 3})
        assert overridden.tau == 0.9
        assert overridden.linker.vertices_per_node == 3
        assert overridden.endpoint.url == dbpedia_server.url

    def test_bad_file_line_reported(self, tmp_path):
        config_file = tmp_path / "bad.conf"
        config_file.write_text("endpoint=http://x\nnot a key value\n")
        with pytest.raises(ConfigError) as info:
            load_config(str(config_file), environ={})
        assert info.value.line == 2

    def test_unknown_key_rejected(self, tmp_path):
        config_file = tmp_path / "bad.conf"
        config_file.write_text("wibble=1\n")
        with pytest.raises(ConfigError):
            load_config(str(config_file), environ={})

    def test_missing_endpoint_rejected(self):
        with pytest.raises(ConfigError):
            load_config(flags={}, environ={})

    def test_fixture_endpoint_spins_server(self):
        settings = default_embeddings(merge_settings(flags={"endpoint": "fixture"}, environ={}))
        with live_endpoint(settings["endpoint"]) as url:
            assert url.startswith("http://127.0.0.1:")
            settings["endpoint"] = url
            cfg = build_config(settings)
            assert cfg.endpoint.url == url
            assert cfg.embedding_path.endswith("embeddings.txt")
