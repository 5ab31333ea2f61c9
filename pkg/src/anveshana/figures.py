"""Render quality-report figures to image files.

Companion to the CLI report path: the Bloom-by-difficulty heatmap, the
pairwise association matrix, and (when computed) the question-answer
similarity histogram. Colors use sequential perceptual palettes; scales are
linear in the underlying counts/values.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .analytics import QualityReport  # noqa: E402
from .corpus import BloomLevel, Difficulty  # noqa: E402
from .similarity import SimilarityHistogram  # noqa: E402


def _annotated_heatmap(ax, matrix, row_labels, col_labels, cmap, fmt):
    image = ax.imshow(matrix, cmap=cmap, aspect="auto")
    ax.set_xticks(range(len(col_labels)), col_labels)
    ax.set_yticks(range(len(row_labels)), row_labels)
    threshold = (max(max(row) for row in matrix) + min(min(row) for row in matrix)) / 2
    for i, row in enumerate(matrix):
        for j, value in enumerate(row):
            ax.text(j, i, format(value, fmt), ha="center", va="center",
                    color="white" if value > threshold else "black", fontsize=9)
    return image


def render_bloom_difficulty_heatmap(counts, path: str | Path) -> Path:
    """6x4 challenge-count heatmap, Bloom levels by difficulty levels."""
    fig, ax = plt.subplots(figsize=(6, 5))
    image = _annotated_heatmap(ax, [list(r) for r in counts],
                               [b.value for b in BloomLevel],
                               [d.value for d in Difficulty], "YlGnBu", "d")
    ax.set_xlabel("Difficulty")
    ax.set_ylabel("Cognitive level")
    ax.set_title("Challenge counts by cognitive level and difficulty")
    fig.colorbar(image, ax=ax, label="challenges")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_association_matrix(matrix, labels, path: str | Path) -> Path:
    """Symmetric Cramér's V matrix across the annotation dimensions."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    image = _annotated_heatmap(ax, [list(r) for r in matrix], labels, labels, "viridis", ".3f")
    image.set_clim(0.0, 1.0)
    ax.set_title("Cross-dimensional association (Cramér's V)")
    fig.colorbar(image, ax=ax, label="V")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_similarity_histogram(histogram: SimilarityHistogram, path: str | Path) -> Path:
    """Distribution of question-answer cosine similarities."""
    centers = [-1.0 + (i + 0.5) * histogram.bin_width for i in range(len(histogram.bins))]
    fig, ax = plt.subplots(figsize=(6.5, 4))
    ax.bar(centers, histogram.bins, width=histogram.bin_width * 0.92, color="#2a7fb8")
    ax.axvspan(*histogram.mode_bin, color="#f8b84e", alpha=0.35,
               label=f"mode bin [{histogram.mode_bin[0]:.2f}, {histogram.mode_bin[1]:.2f}]")
    ax.set_xlabel("cosine similarity")
    ax.set_ylabel("pairs")
    ax.set_title(f"Question-answer similarity (n={histogram.n}, mean={histogram.mean:.3f})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_report_figures(report: QualityReport, out_dir: str | Path) -> list[Path]:
    """Write every figure the report supports; returns the created paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [
        render_bloom_difficulty_heatmap(report.bloom_difficulty_counts,
                                        out / "bloom_difficulty_heatmap.png"),
        render_association_matrix(report.pairwise_cramers_v,
                                  list(report.per_dimension.keys()),
                                  out / "association_matrix.png"),
    ]
    if report.qa_similarity is not None:
        written.append(render_similarity_histogram(report.qa_similarity,
                                                   out / "qa_similarity_histogram.png"))
    return written
