"""Command-line interface: answer, bench, serve, fixture-serve."""

from __future__ import annotations

import json
import sys

import click

from .affinity import EmbeddingStore
from .config import build_config, fixture_path, merge_settings
from .errors import AskGraphError
from .fixture import FixtureServer, FixtureStore
from .pipeline import answer_question, default_embeddings, live_endpoint, run_benchmark
from .report import write_report
from .service import create_app, result_to_dict


def _config_options(command):
    options = [
        click.option("--endpoint", help="SPARQL endpoint URL, 'fixture', or a .nt path"),
        click.option("--dialect", type=click.Choice(["virtuoso", "stardog", "generic_regex"])),
        click.option("--embeddings", help="word vector text file"),
        click.option("--max-vr", "max_vr", type=int, help="max fetched vertices per probe"),
        click.option("--k-vertices", "k_vertices", type=int, help="vertices kept per node"),
        click.option("--k-predicates", "k_predicates", type=int, help="predicates kept per edge"),
        click.option("--max-queries", "max_queries", type=int, help="top-K SPARQL queries"),
        click.option("--tau", type=float, help="semantic-type filter threshold"),
        click.option("--qu-url", "qu_url", help="remote question-understanding model URL"),
        click.option("--timeout", type=float, help="endpoint request timeout (s)"),
        click.option("--parallelism", type=int, help="concurrent plan executions"),
        click.option("--config", "config_file", type=click.Path(exists=True)),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _settings_from(config_file, **flags) -> dict:
    return default_embeddings(merge_settings(config_file, flags))


@click.group()
@click.version_option(package_name="askgraph")
def main():
    """Ask natural-language questions against any SPARQL endpoint."""


@main.command()
@click.argument("question")
@_config_options
@click.option("--full", is_flag=True, help="print the full JSON payload")
def answer(question, config_file, full, **flags):
    """Answer one question and print the result."""
    settings = _settings_from(config_file, **flags)
    try:
        with live_endpoint(settings.get("endpoint")) as url:
            settings["endpoint"] = url
            cfg = build_config(settings)
            store = EmbeddingStore.from_file(cfg.embedding_path)
            result = answer_question(question, cfg, store)
    except AskGraphError as exc:
        raise click.ClickException(str(exc))
    if full:
        click.echo(json.dumps(result_to_dict(result), indent=2))
        return
    for item in result.answers.answers:
        click.echo(item.term.value)
    if not result.answers.answers:
        click.echo("(no answers)", err=True)
    timing = ", ".join(
        f"{phase}={result.timings[phase]:.3f}s"
        for phase in ("qu", "linking", "execution_filtration")
    )
    click.echo(f"[{timing}]", err=True)


@main.command()
@click.argument("benchmark_file", type=click.Path(exists=True))
@_config_options
@click.option("--out", "out_dir", default="bench-report", show_default=True,
              help="directory for report.json, per_question.csv and figures")
def bench(benchmark_file, config_file, out_dir, **flags):
    """Run a benchmark file and write the evaluation report."""
    settings = _settings_from(config_file, **flags)
    try:
        with live_endpoint(settings.get("endpoint")) as url:
            settings["endpoint"] = url
            cfg = build_config(settings)
            store = EmbeddingStore.from_file(cfg.embedding_path)
            report = run_benchmark(benchmark_file, cfg, store)
    except AskGraphError as exc:
        raise click.ClickException(str(exc))
    paths = write_report(report, out_dir)
    macro = report["macro"]
    click.echo(
        f"macro P={macro['p']:.4f} R={macro['r']:.4f} F1={macro['f1']:.4f}"
        f" over {report['questions']} questions"
    )
    for name, path in paths.items():
        click.echo(f"{name}: {path}")


@main.command()
@_config_options
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--console", "console_dir", type=click.Path(), default=None,
              help="static directory with the web console build")
def serve(config_file, host, port, console_dir, **flags):
    """Run the HTTP service."""
    import uvicorn

    settings = _settings_from(config_file, **flags)
    with live_endpoint(settings.get("endpoint")) as url:
        settings["endpoint"] = url
        app = create_app(settings, console_dir=console_dir)
        uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("fixture-serve")
@click.option("--data", default=None, help="N-Triples file (default: bundled slice)")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8890, show_default=True, type=int)
def fixture_serve(data, host, port):
    """Serve the bundled fixture knowledge graph as a SPARQL endpoint."""
    store = FixtureStore.from_ntriples(data or fixture_path("dbpedia_slice.nt"))
    server = FixtureServer(store, host=host, port=port)
    server.start()
    click.echo(f"fixture endpoint at {server.url} ({len(store.triples)} triples)")
    click.echo("Ctrl-C to stop")
    try:
        import time

        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()
        sys.exit(0)


if __name__ == "__main__":
    main()
