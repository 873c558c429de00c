"""Command-line interface: segment, partition-demo, bench, and sweep.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 convergence
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eigen import SegmentationResult, segment
from .hardness import PartitionInstance, brute_force_blocks, decide_partition
from .imagecore import (
    IndexedImage,
    PnmError,
    RawImage,
    load_image,
    quantize_gray,
    resize_max,
    write_mask,
    write_ppm,
)
from .oracle_large import estimate_sigma, kmeans_cluster
from .report import (
    benchmark_matvec_segment,
    format_bench_table,
    segment_figure,
    write_report_dir,
)
from .smoothness import SmoothnessGraph, build_smoothness

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CONVERGENCE = 4


@dataclass
class RunConfig:
    """Pipeline parameters; defaults follow the standard protocol."""

    mode: str = "gray"
    lam: float = 1.0
    gray_levels: int = 16
    classes: int = 16
    sigma2: float | None = None  # None = estimate from the image
    connectivity: int = 4
    smoothness_mode: str = "constant"
    smoothness_offset: float = 0.0
    estimator: str = "consistent"
    max_dim: int = 256
    seed: int = 42
    tol: float = 1e-6


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _parse_sigma2(text: str) -> float | None:
    if text == "auto":
        return None
    value = float(text)
    if value <= 0:
        raise ValueError("sigma2 must be positive")
    return value


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        mode=args.mode,
        lam=args.lam,
        gray_levels=args.gray_levels,
        classes=args.classes,
        sigma2=_parse_sigma2(args.sigma2),
        connectivity=args.connectivity,
        smoothness_mode=args.smoothness_mode,
        smoothness_offset=args.smoothness_offset,
        estimator=args.estimator,
        max_dim=args.max_dim,
        seed=args.seed,
        tol=args.tol,
    )
    if cfg.lam < 0:
        raise ValueError("lambda must be nonnegative")
    if not 2 <= cfg.gray_levels <= 256:
        raise ValueError("gray-levels must be in [2, 256]")
    if cfg.classes < 1:
        raise ValueError("classes must be at least 1")
    if cfg.smoothness_offset < 0:
        raise ValueError("smoothness-offset must be nonnegative")
    if cfg.max_dim < 1:
        raise ValueError("max-dim must be at least 1")
    if cfg.tol <= 0:
        raise ValueError("tol must be positive")
    return cfg


def prepare_pipeline(
    raw: RawImage, cfg: RunConfig
) -> tuple[RawImage, IndexedImage, SmoothnessGraph, float | None]:
    """Resize, index, and build the smoothness graph for one image."""
    raw = resize_max(raw, cfg.max_dim)
    if cfg.mode == "gray":
        indexed = quantize_gray(raw, cfg.gray_levels)
        sigma2 = None
    else:
        indexed = kmeans_cluster(raw, min(cfg.classes, raw.total), seed=cfg.seed)
        sigma2 = cfg.sigma2 if cfg.sigma2 is not None else estimate_sigma(raw)
    graph = build_smoothness(
        raw,
        connectivity=cfg.connectivity,
        mode=cfg.smoothness_mode,
        offset=cfg.smoothness_offset,
    )
    return raw, indexed, graph, sigma2


def run_pipeline(
    raw: RawImage, cfg: RunConfig
) -> tuple[SegmentationResult, RawImage, IndexedImage, dict]:
    """Full pipeline on a decoded image; returns result, resized raw, timings."""
    times: dict[str, float] = {}
    t0 = time.perf_counter()
    raw, indexed, graph, sigma2 = prepare_pipeline(raw, cfg)
    times["time_prepare"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    result = segment(
        indexed,
        graph,
        cfg.lam,
        mode="small" if cfg.mode == "gray" else "large",
        sigma2=sigma2,
        estimator=cfg.estimator,
        tol=cfg.tol,
        seed=cfg.seed,
    )
    times["time_solve"] = time.perf_counter() - t0
    return result, raw, indexed, times


def _overlay_image(raw: RawImage, fore: np.ndarray) -> RawImage:
    """Foreground pixels blended halfway toward red."""
    pixels = raw.pixels.astype(np.int64).copy()
    mask = fore.reshape(raw.height, raw.width)
    pixels[mask] = (pixels[mask] + np.array([255, 0, 0])) // 2
    return RawImage(raw.width, raw.height, pixels.astype(np.uint8))


def _stats_lines(
    cfg: RunConfig, indexed: IndexedImage, result: SegmentationResult, times: dict
) -> list[str]:
    eig = result.eigen
    stats = {
        "mode": cfg.mode,
        "n": indexed.total,
        "width": indexed.width,
        "height": indexed.height,
        "classes": indexed.class_count,
        "lambda": repr(cfg.lam),
        "seed": cfg.seed,
        "tol": repr(cfg.tol),
        "eigenvalue": repr(eig.eigenvalue),
        "iterations": eig.iterations,
        "residual": repr(eig.residual_norm),
        "converged": int(eig.converged),
        "exact_data": repr(result.exact.data_term),
        "exact_smooth": repr(result.exact.smoothness_term),
        "exact_total": repr(result.exact.total),
        "approx_energy": repr(result.approx),
        "approx_energy_with_constants": repr(result.approx_with_constants),
        "cut_value": repr(result.cut_value),
        "s0": result.fore_count,
        "s1": result.back_count,
        "boundary_edges": result.boundary_edges,
    }
    stats.update({k: repr(v) for k, v in times.items()})
    stats["time_total"] = repr(sum(times.values()))
    return [f"{k}={v}" for k, v in stats.items()]


def cmd_segment(args) -> int:
    try:
        cfg = _config_from_args(args)
    except ValueError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    t0 = time.perf_counter()
    try:
        raw = load_image(args.input)
    except (OSError, PnmError) as exc:
        return _fail(EXIT_IO, f"cannot read {args.input}: {exc}")
    load_time = time.perf_counter() - t0
    try:
        result, raw, indexed, times = run_pipeline(raw, cfg)
    except FloatingPointError as exc:
        return _fail(EXIT_CONVERGENCE, str(exc))
    times = {"time_load": load_time, **times}
    try:
        write_mask(result.labeling, indexed.width, indexed.height, args.output)
        if args.overlay:
            write_ppm(_overlay_image(raw, result.labeling.fore), args.overlay)
        if args.stats:
            Path(args.stats).write_text("\n".join(_stats_lines(cfg, indexed, result, times)) + "\n")
        if args.stats_json:
            lines = dict(line.split("=", 1) for line in _stats_lines(cfg, indexed, result, times))
            Path(args.stats_json).write_text(json.dumps(lines, indent=2) + "\n")
        if args.figure:
            segment_figure(raw, result, args.figure)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write output: {exc}")
    if not result.eigen.converged:
        return _fail(EXIT_CONVERGENCE, "eigensolver did not reach the residual tolerance")
    return EXIT_OK


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValueError(f"not a comma-separated integer list: {text!r}") from None


def cmd_partition(args) -> int:
    try:
        values = _parse_int_list(args.values)
        if not values:
            raise ValueError("need at least one value")
        if len(values) > 24:
            raise ValueError("at most 24 values supported")
        inst = PartitionInstance(tuple(values))
    except ValueError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    minimum = brute_force_blocks(inst)
    k = inst.total / 2.0
    target = 2.0 * k * math.log(k) - sum(x * math.log(x) for x in inst.values)
    print(f"values={','.join(str(v) for v in inst.values)}")
    print(f"total={inst.total}")
    print(f"min_block_energy={minimum!r}")
    print(f"target={target!r}")
    print(f"partition={'YES' if decide_partition(inst) else 'NO'}")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        sizes = _parse_int_list(args.sizes)
        if not sizes:
            raise ValueError("need at least one size")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be strictly ascending")
        if args.repeats < 1:
            raise ValueError("repeats must be at least 1")
    except ValueError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    rows = benchmark_matvec_segment(sizes, args.repeats, seed=args.seed)
    print(format_bench_table(rows))
    if args.report_dir:
        try:
            csv_path, fig_path = write_report_dir(args.report_dir, "bench", rows)
        except OSError as exc:
            return _fail(EXIT_IO, f"cannot write report: {exc}")
        print(f"report: {csv_path} {fig_path}")
    return EXIT_OK


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise ValueError(f"not a comma-separated number list: {text!r}") from None


def cmd_sweep(args) -> int:
    try:
        cfg = _config_from_args(args)
        lambdas = _parse_float_list(args.lambdas)
        if not lambdas:
            raise ValueError("need at least one lambda")
    except ValueError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    try:
        raw = load_image(args.input)
    except (OSError, PnmError) as exc:
        return _fail(EXIT_IO, f"cannot read {args.input}: {exc}")
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        raw2, indexed, graph, sigma2 = prepare_pipeline(raw, cfg)
        rows = []
        for lam in lambdas:
            result = segment(
                indexed,
                graph,
                float(lam),
                mode="small" if cfg.mode == "gray" else "large",
                sigma2=sigma2,
                estimator=cfg.estimator,
                tol=cfg.tol,
                seed=cfg.seed,
            )
            write_mask(
                result.labeling, indexed.width, indexed.height,
                out_dir / f"mask_lambda{lam:g}.pgm",
            )
            rows.append(
                {
                    "lambda": lam,
                    "boundary_edges": result.boundary_edges,
                    "cut_value": result.cut_value,
                    "exact_data": result.exact.data_term,
                    "exact_smooth": result.exact.smoothness_term,
                    "exact_total": result.exact.total,
                    "eigenvalue": result.eigen.eigenvalue,
                    "fore": result.fore_count,
                    "back": result.back_count,
                }
            )
        csv_path, fig_path = write_report_dir(out_dir, "sweep", rows)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write sweep outputs: {exc}")
    except FloatingPointError as exc:
        return _fail(EXIT_CONVERGENCE, str(exc))
    first, last = rows[0], rows[-1]
    trend = "yes" if last["boundary_edges"] <= first["boundary_edges"] else "no"
    print(
        f"boundary_edges: lambda={first['lambda']} -> {first['boundary_edges']}, "
        f"lambda={last['lambda']} -> {last['boundary_edges']} (non-increasing: {trend})"
    )
    print(f"report: {csv_path} {fig_path}")
    return EXIT_OK


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="input PGM (P5) or PPM (P6), maxval 255")
    p.add_argument("--mode", choices=["gray", "color"], default="gray")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="smoothness factor (default 1)")
    p.add_argument("--gray-levels", type=int, default=16)
    p.add_argument("--classes", type=int, default=16, help="color classes for color mode")
    p.add_argument("--sigma2", default="auto", help="kernel variance or 'auto'")
    p.add_argument("--connectivity", type=int, choices=[4, 8], default=4)
    p.add_argument("--smoothness-mode", choices=["constant", "exponential"], default="constant")
    p.add_argument("--smoothness-offset", type=float, default=0.0)
    p.add_argument("--estimator", choices=["paper", "consistent"], default="consistent")
    p.add_argument("--max-dim", type=int, default=256)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenseg",
        description="Automatic binary segmentation via the top eigenvector of "
        "an implicit pixel-affinity matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_seg = sub.add_parser("segment", help="segment one image")
    _add_pipeline_flags(p_seg)
    p_seg.add_argument("--output", required=True, help="mask PGM path (fore=255)")
    p_seg.add_argument("--overlay", help="optional overlay PPM path")
    p_seg.add_argument("--stats", help="optional key=value stats path")
    p_seg.add_argument("--stats-json", help="optional JSON mirror of the stats")
    p_seg.add_argument("--figure", help="optional PNG diagnostic figure path")
    p_seg.set_defaults(func=cmd_segment)

    p_part = sub.add_parser("partition-demo", help="decide an equal-sum split instance")
    p_part.add_argument("values", help="comma-separated positive integers, e.g. 1,2,3")
    p_part.set_defaults(func=cmd_partition)

    p_bench = sub.add_parser("bench", help="time the structured matvec and full runs")
    p_bench.add_argument("--sizes", required=True, help="ascending pixel counts, e.g. 4096,16384")
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=42)
    p_bench.add_argument("--report-dir", help="write bench.csv and bench.png here")
    p_bench.set_defaults(func=cmd_bench)

    p_sweep = sub.add_parser("sweep", help="segment at several lambdas and compare")
    _add_pipeline_flags(p_sweep)
    p_sweep.add_argument("--lambdas", default="1,5,10", help="comma-separated lambda values")
    p_sweep.add_argument("--out-dir", required=True, help="masks, sweep.csv, sweep.png go here")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
