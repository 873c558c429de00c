"""Shared generators and independent dense-entry oracles for the test suite."""

import numpy as np
import pytest

from eigenseg.imagecore import IndexedImage, Labeling, RawImage, quantize_gray
from eigenseg.oracle_large import kmeans_cluster
from eigenseg.smoothness import SmoothnessGraph, build_smoothness


def random_raw(rng: np.random.Generator, max_side: int = 12, gray: bool = True) -> RawImage:
    w = int(rng.integers(1, max_side + 1))
    h = int(rng.integers(1, max_side + 1))
    if gray:
        g = rng.integers(0, 256, size=(h, w, 1))
        pixels = np.repeat(g, 3, axis=2).astype(np.uint8)
    else:
        pixels = rng.integers(0, 256, size=(h, w, 3)).astype(np.uint8)
    return RawImage(w, h, pixels)


def random_scene(
    rng: np.random.Generator,
    max_pixels: int = 1024,
    gray: bool = True,
    levels: int = 16,
    classes: int = 8,
) -> tuple[RawImage, IndexedImage]:
    """Random image of at most max_pixels, indexed through the real pipeline."""
    side_cap = max(2, int(np.sqrt(max_pixels)))
    w = int(rng.integers(2, side_cap + 1))
    h = int(rng.integers(2, side_cap + 1))
    if gray:
        g = rng.integers(0, 256, size=(h, w, 1))
        pixels = np.repeat(g, 3, axis=2).astype(np.uint8)
        raw = RawImage(w, h, pixels)
        return raw, quantize_gray(raw, levels)
    pixels = rng.integers(0, 256, size=(h, w, 3)).astype(np.uint8)
    raw = RawImage(w, h, pixels)
    m = min(classes, raw.total)
    return raw, kmeans_cluster(raw, m, seed=int(rng.integers(1 << 30)), max_iter=30)


def random_labeling(rng: np.random.Generator, n: int) -> Labeling:
    return Labeling(rng.random(n) < 0.5)


def entrywise_small_matrix(img: IndexedImage, graph: SmoothnessGraph, lam: float) -> np.ndarray:
    """Per-entry weight rule applied literally, independent of the oracle code."""
    n = img.total
    w = np.zeros((n, n))
    edge_weight = {}
    for p, q, s in zip(graph.p, graph.q, graph.w):
        edge_weight[(int(p), int(q))] = float(s)
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            val = -5.0 / (2 * n)
            if img.class_of[p] == img.class_of[q]:
                val += 5.0 / (2 * int(img.counts[img.class_of[p]]))
            key = (min(p, q), max(p, q))
            if key in edge_weight:
                val += lam * edge_weight[key]
            w[p, q] = val
    return w


def entrywise_large_matrix(img, graph, lam, model) -> np.ndarray:
    """Kernel-class weight rule applied literally per entry."""
    n = img.total
    w = np.zeros((n, n))
    edge_weight = {}
    for p, q, s in zip(graph.p, graph.q, graph.w):
        edge_weight[(int(p), int(q))] = float(s)
    w2 = model.class_pair_w2
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            val = -5.0 / (2 * n) + w2[img.class_of[p], img.class_of[q]]
            key = (min(p, q), max(p, q))
            if key in edge_weight:
                val += lam * edge_weight[key]
            w[p, q] = val
    return w


def class_pair_objective(img, graph, lam, model, labeling) -> float:
    """Kernel-model surrogate: direct double sum of cross-pair weights by class."""
    from eigenseg.smoothness import smoothness_cut

    n0 = np.bincount(img.class_of[labeling.fore], minlength=img.class_count).astype(float)
    n1 = img.counts.astype(float) - n0
    n = img.total
    w2 = model.class_pair_w2
    total = 0.0
    for a in range(img.class_count):
        for b in range(img.class_count):
            total += n0[a] * n1[b] * (-2.5 / n + w2[a, b])
    return total + lam * smoothness_cut(graph, labeling)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def constant_graph(img: RawImage, connectivity: int = 4) -> SmoothnessGraph:
    return build_smoothness(img, connectivity=connectivity, mode="constant")
