"""Delimited reports and matplotlib figures for runs, sweeps, and benchmarks."""

from __future__ import annotations

import csv
import time
from pathlib import Path

import numpy as np

from .eigen import SegmentationResult, segment
from .imagecore import RawImage, quantize_gray
from .oracle_small import build_small_oracle
from .smoothness import build_smoothness
from .synthetic import random_noise_image

BENCH_FIELDS = ("n", "matvec_seconds", "segment_seconds", "matvec_ratio", "segment_ratio")
SWEEP_FIELDS = (
    "lambda",
    "boundary_edges",
    "cut_value",
    "exact_data",
    "exact_smooth",
    "exact_total",
    "eigenvalue",
    "fore",
    "back",
)


def _plt():
    """Import pyplot lazily with a headless backend; figures are file-only."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def write_csv(path, fieldnames, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fieldnames})


def segment_figure(raw: RawImage, result: SegmentationResult, path) -> None:
    """Three panels: input, relaxed indicator field, thresholded mask."""
    plt = _plt()
    h, w = raw.height, raw.width
    fig, axes = plt.subplots(1, 3, figsize=(9, 3.2))
    axes[0].imshow(raw.pixels)
    axes[0].set_title("input")
    field = result.eigen.eigenvector.reshape(h, w)
    vmax = float(np.abs(field).max()) or 1.0
    im = axes[1].imshow(field, cmap="coolwarm", vmin=-vmax, vmax=vmax)
    axes[1].set_title("indicator field")
    fig.colorbar(im, ax=axes[1], fraction=0.046)
    axes[2].imshow(result.labeling.fore.reshape(h, w), cmap="gray")
    axes[2].set_title(f"mask (cut edges: {result.boundary_edges})")
    for ax in axes:
        ax.set_xticks([])
        ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def sweep_figure(rows: list[dict], path) -> None:
    """Boundary length and energies as functions of the smoothness factor."""
    plt = _plt()
    lams = [row["lambda"] for row in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    ax1.plot(lams, [row["boundary_edges"] for row in rows], "o-")
    ax1.set_xlabel("lambda")
    ax1.set_ylabel("boundary edges")
    ax1.set_title("boundary length vs lambda")
    ax2.plot(lams, [row["exact_data"] for row in rows], "o-", label="data")
    ax2.plot(lams, [row["exact_total"] for row in rows], "s-", label="total")
    ax2.set_xlabel("lambda")
    ax2.set_ylabel("energy (nats)")
    ax2.legend()
    ax2.set_title("exact energy vs lambda")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def bench_figure(rows: list[dict], path) -> None:
    """Measured wall times against a linear reference."""
    plt = _plt()
    ns = np.array([row["n"] for row in rows], dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for key, marker in (("matvec_seconds", "o"), ("segment_seconds", "s")):
        ax.loglog(ns, [row[key] for row in rows], marker + "-", label=key.split("_")[0])
    base = rows[0]["matvec_seconds"]
    ax.loglog(ns, base * ns / ns[0], "k--", alpha=0.5, label="linear reference")
    ax.set_xlabel("pixels")
    ax.set_ylabel("seconds")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def benchmark_matvec_segment(
    sizes: list[int], repeats: int, seed: int = 42, matvecs_per_sample: int = 300
) -> list[dict]:
    """Best-of-`repeats` matvec and end-to-end timings on synthetic noise images.

    Each size is realized as a near-square gray noise image, quantized to 16
    classes with constant smoothness, so the class count stays fixed while n
    grows.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly ascending")
    cases = []
    for size in sizes:
        side = max(2, int(round(np.sqrt(size))))
        raw = random_noise_image(side, side, seed=seed)
        indexed = quantize_gray(raw, 16)
        graph = build_smoothness(raw, connectivity=4, mode="constant")
        oracle = build_small_oracle(indexed, graph, 1.0)
        r = np.random.default_rng(seed).standard_normal(indexed.total)
        cases.append((indexed, graph, oracle, r))
    # warm up every size before any timing (first-touch and frequency ramp)
    for _, _, oracle, r in cases:
        for _ in range(50):
            oracle.matvec(r)
    # interleave repeats across sizes so clock drift cancels out of the ratios
    best_mv = [np.inf] * len(cases)
    for _ in range(repeats):
        for k, (_, _, oracle, r) in enumerate(cases):
            t0 = time.perf_counter()
            for _ in range(matvecs_per_sample):
                oracle.matvec(r)
            best_mv[k] = min(best_mv[k], (time.perf_counter() - t0) / matvecs_per_sample)
    best_seg = [np.inf] * len(cases)
    for _ in range(repeats):
        for k, (indexed, graph, _, _) in enumerate(cases):
            t0 = time.perf_counter()
            segment(indexed, graph, 1.0, mode="small", seed=seed)
            best_seg[k] = min(best_seg[k], time.perf_counter() - t0)
    rows = []
    for k, (indexed, _, _, _) in enumerate(cases):
        rows.append(
            {
                "n": indexed.total,
                "matvec_seconds": best_mv[k],
                "segment_seconds": best_seg[k],
                "matvec_ratio": "" if k == 0 else best_mv[k] / best_mv[k - 1],
                "segment_ratio": "" if k == 0 else best_seg[k] / best_seg[k - 1],
            }
        )
    return rows


def format_bench_table(rows: list[dict]) -> str:
    lines = ["n\tmatvec_s\tsegment_s\tmatvec_ratio\tsegment_ratio"]
    for row in rows:
        mv_ratio = f"{row['matvec_ratio']:.2f}" if row["matvec_ratio"] != "" else "-"
        seg_ratio = f"{row['segment_ratio']:.2f}" if row["segment_ratio"] != "" else "-"
        lines.append(
            f"{row['n']}\t{row['matvec_seconds']:.3e}\t{row['segment_seconds']:.3e}"
            f"\t{mv_ratio}\t{seg_ratio}"
        )
    return "\n".join(lines)


def write_report_dir(out_dir, kind: str, rows: list[dict]) -> tuple[Path, Path]:
    """CSV plus figure for a bench or sweep run; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{kind}.csv"
    fig_path = out / f"{kind}.png"
    if kind == "bench":
        write_csv(csv_path, BENCH_FIELDS, rows)
        bench_figure(rows, fig_path)
    elif kind == "sweep":
        write_csv(csv_path, SWEEP_FIELDS, rows)
        sweep_figure(rows, fig_path)
    else:
        raise ValueError(f"unknown report kind {kind!r}")
    return csv_path, fig_path
