"""Command-line interface: offline analysis, corpus synthesis, and the server."""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click

from .analytics import QualityReport, quality_report
from .config import load_config
from .corpus import build_corpus, export_corpus, parse_challenges
from .errors import AnveshanaError
from .similarity import HashedTfEmbedder, HttpEmbeddingProvider, qa_similarity_distribution
from .synth import REFERENCE_PROFILE, synthesize_corpus


def _report_csv(report: QualityReport) -> str:
    """Flatten the report into tidy section,key,metric,value rows."""
    out = io.StringIO(newline="")
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(["section", "key", "metric", "value"])
    for dimension, metrics in report.per_dimension.items():
        for metric, value in metrics.items():
            writer.writerow(["per_dimension", dimension, metric, value])
    dims = list(report.per_dimension.keys())
    for i, row in enumerate(report.pairwise_cramers_v):
        for j, value in enumerate(row):
            writer.writerow(["pairwise_cramers_v", f"{dims[i]}|{dims[j]}", "v", value])
    blooms = ["Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create"]
    difficulties = ["Easy", "Medium", "Hard", "Expert"]
    for i, row in enumerate(report.bloom_difficulty_counts):
        for j, value in enumerate(row):
            writer.writerow(["bloom_difficulty_counts",
                             f"{blooms[i]}|{difficulties[j]}", "count", value])
    if report.qa_similarity is not None:
        hist = report.qa_similarity
        writer.writerow(["qa_similarity", "", "n", hist.n])
        writer.writerow(["qa_similarity", "", "mean", hist.mean])
        writer.writerow(["qa_similarity", "", "mode_bin_low", hist.mode_bin[0]])
        writer.writerow(["qa_similarity", "", "mode_bin_high", hist.mode_bin[1]])
        for i, count in enumerate(hist.bins):
            low = -1.0 + i * hist.bin_width
            writer.writerow(["qa_similarity", f"[{low:.2f},{low + hist.bin_width:.2f})",
                             "count", count])
    writer.writerow(["report", "", "generated_at", report.generated_at])
    return out.getvalue()


def _load_corpus_file(path: Path):
    if not path.exists():
        raise click.ClickException(f"cannot read {path}: no such file")
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    try:
        challenges, issues = parse_challenges(path.read_bytes(), fmt)
    except AnveshanaError as exc:
        raise click.ClickException(f"{path}: {exc}") from exc
    corpus, build_issues = build_corpus(challenges)
    return corpus, issues + build_issues


@click.group()
def main():
    """Adaptive-learning platform engine."""


@main.command()
@click.argument("corpus_file", type=click.Path(path_type=Path))
@click.option("--json", "output_format", flag_value="json", default=True,
              help="Emit the report as JSON (default).")
@click.option("--csv", "output_format", flag_value="csv",
              help="Emit the report as tidy CSV rows.")
@click.option("--with-similarity", is_flag=True,
              help="Include the question-answer similarity histogram.")
@click.option("--figures", "figures_dir", type=click.Path(path_type=Path), default=None,
              help="Also render report figures (PNG) into this directory.")
@click.option("--embedding-url", default=None,
              help="External embedding service for --with-similarity "
                   "(default: built-in deterministic embedder).")
def analyze(corpus_file: Path, output_format: str, with_similarity: bool,
            figures_dir: Path | None, embedding_url: str | None):
    """Compute the annotation-quality report for a corpus file."""
    corpus, issues = _load_corpus_file(corpus_file)
    if issues:
        click.echo(f"warning: {len(issues)} record(s) rejected during parsing", err=True)
    if len(corpus) == 0:
        raise click.ClickException("corpus is empty; nothing to analyze")

    histogram = None
    if with_similarity:
        provider = HttpEmbeddingProvider(embedding_url) if embedding_url \
            else HashedTfEmbedder()
        histogram = qa_similarity_distribution(corpus, provider)

    try:
        report = quality_report(corpus, histogram)
    except AnveshanaError as exc:
        raise click.ClickException(str(exc)) from exc

    if output_format == "csv":
        sys.stdout.write(_report_csv(report))
    else:
        click.echo(json.dumps(report.as_dict(), indent=2))

    if figures_dir is not None:
        from .figures import render_report_figures  # matplotlib import stays optional

        for path in render_report_figures(report, figures_dir):
            click.echo(f"wrote {path}", err=True)


@main.command()
@click.argument("out_file", type=click.Path(path_type=Path))
@click.option("--size", default=REFERENCE_PROFILE.size, show_default=True,
              help="Number of challenges to generate.")
@click.option("--seed", default=0, show_default=True)
def synth(out_file: Path, size: int, seed: int):
    """Generate a demo corpus matching the reference annotation profile."""
    from dataclasses import replace as dc_replace

    profile = dc_replace(REFERENCE_PROFILE, size=size)
    corpus, _ = build_corpus(synthesize_corpus(profile, seed=seed))
    fmt = "json" if out_file.suffix.lower() == ".json" else "csv"
    out_file.write_bytes(export_corpus(corpus, fmt))
    click.echo(f"wrote {len(corpus)} challenges across "
               f"{len(corpus.category_set)} categories to {out_file}", err=True)


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Platform config JSON (env vars ANVESHANA_* override).")
@click.option("--host", default=None, help="Override the configured listen host.")
@click.option("--port", default=None, type=int, help="Override the configured listen port.")
@click.option("--corpus", "corpus_file", type=click.Path(path_type=Path), default=None,
              help="Seed the data directory with this corpus before serving.")
def serve(config_path: Path | None, host: str | None, port: int | None,
          corpus_file: Path | None):
    """Run the HTTP API server."""
    import uvicorn

    from .service import create_app
    from .store import PersistedStore

    config = load_config(config_path)
    store = PersistedStore(config.data_dir)
    if corpus_file is not None:
        corpus, issues = _load_corpus_file(corpus_file)
        if issues:
            click.echo(f"warning: {len(issues)} record(s) rejected", err=True)
        store.save_corpus(corpus)
    app = create_app(config, store)
    uvicorn.run(app, host=host or config.listen_host, port=port or config.listen_port)


if __name__ == "__main__":
    main()
