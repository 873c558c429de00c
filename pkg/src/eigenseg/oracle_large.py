"""Kernel color model for large color spaces and its implicit weight matrix.

Pixels are first clustered into m color classes. Each pixel contributes a
Gaussian kernel around its color with fidelity sigma^2; because every pixel
of a class shares the class centroid after quantization, all densities reduce
to an m x m table and the pairwise attraction term becomes a symmetric m x m
matrix classPairW2. Off-diagonal weights are

    w(p,q) = -5/(2n) + classPairW2[class(p)][class(q)] + lam*S(p,q) if adjacent

with zero diagonal, and the matvec follows the same O(n) decomposition as the
histogram oracle with the per-class term generalized to a dense m x m mix.

Two estimators are provided for classPairW2. 'paper' divides each sample's
product of densities by the density normalizer once; 'consistent' divides by
its square, which is the importance-weighted form that reproduces the
histogram weights 5/(2*n_i) exactly as sigma^2 -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .imagecore import IndexedImage, Labeling, RawImage
from .smoothness import SmoothnessGraph, grid_edges

ESTIMATORS = ("paper", "consistent")


@dataclass(frozen=True)
class KernelModel:
    """Per-class kernel statistics and the pairwise attraction table."""

    sigma2: float
    class_means: np.ndarray    # (m, 3) float64
    class_counts: np.ndarray   # (m,) int64
    class_pair_w2: np.ndarray  # (m, m) float64, symmetric, >= 0
    estimator: str


def kernel_density(model: KernelModel, from_color, at_color) -> float:
    """Gaussian kernel contribution of `from_color` evaluated at `at_color`.

    (2*pi*sigma^2)^(-1/2) * exp(-||from - at||^2 / (2*sigma^2)), with the
    squared Euclidean RGB distance in the exponent.
    """
    d2 = float(((np.asarray(from_color, float) - np.asarray(at_color, float)) ** 2).sum())
    s2 = model.sigma2
    return float((2.0 * np.pi * s2) ** -0.5 * np.exp(-d2 / (2.0 * s2)))


def estimate_sigma(img: RawImage) -> float:
    """Fidelity sigma^2 = mean squared RGB distance over 4-adjacent pairs.

    Clamped below by 1.0 so constant images stay usable.
    """
    p, q = grid_edges(img.width, img.height, 4)
    if len(p) == 0:
        return 1.0
    colors = img.flat_colors()
    d2 = ((colors[p] - colors[q]) ** 2).sum(axis=1)
    return max(float(d2.mean()), 1.0)


def _kmeans_pp_centers(colors: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: centers drawn from the data, weighted by squared distance."""
    centers = np.empty((m, 3))
    centers[0] = colors[rng.integers(len(colors))]
    d2 = ((colors - centers[0]) ** 2).sum(axis=1)
    for k in range(1, m):
        total = d2.sum()
        if total <= 0.0:
            idx = 0  # all points coincide with chosen centers
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total))
            idx = min(idx, len(colors) - 1)
        centers[k] = colors[idx]
        d2 = np.minimum(d2, ((colors - centers[k]) ** 2).sum(axis=1))
    return centers


def kmeans_cluster(img: RawImage, m: int, seed: int = 42, max_iter: int = 100) -> IndexedImage:
    """Lloyd k-means in RGB space with k-means++ seeding.

    Deterministic for a fixed seed; assignment ties go to the lowest class
    index; empty clusters are re-seeded from the farthest point. Clusters
    still empty at convergence are compacted away.
    """
    colors = img.flat_colors()
    n = len(colors)
    if not 1 <= m <= n:
        raise ValueError("class count must be in [1, pixel count]")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_centers(colors, m, rng)
    norms = (colors**2).sum(axis=1)
    assign = None
    for _ in range(max_iter):
        d2 = norms[:, None] - 2.0 * colors @ centers.T + (centers**2).sum(axis=1)[None, :]
        new_assign = d2.argmin(axis=1)
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        dist_own = d2[np.arange(n), assign]
        counts = np.bincount(assign, minlength=m)
        for k in range(m):
            if counts[k] > 0:
                centers[k] = colors[assign == k].mean(axis=0)
            else:
                far = int(dist_own.argmax())
                if dist_own[far] <= 0.0:
                    continue  # every pixel sits on a center; leave duplicate
                centers[k] = colors[far]
                assign[far] = k
                dist_own[far] = 0.0
                counts[k] = 1
    survivors, class_of = np.unique(assign, return_inverse=True)
    class_of = class_of.astype(np.int64).ravel()
    counts = np.bincount(class_of)
    means = np.stack(
        [colors[class_of == i].mean(axis=0) for i in range(len(survivors))]
    )
    return IndexedImage(img.width, img.height, class_of, counts, means)


def build_class_kernel(
    img: IndexedImage, sigma2: float, estimator: str = "consistent"
) -> KernelModel:
    """Build the m x m pairwise attraction table from class centroids.

    Every pixel is represented by its class centroid with multiplicity equal
    to the class count, so the per-sample sum collapses to O(m^3) after the
    m x m density table.
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}")
    means = img.means.astype(np.float64)
    counts = img.counts.astype(np.float64)
    m = img.class_count
    d2 = ((means[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    dens = (2.0 * np.pi * sigma2) ** -0.5 * np.exp(-d2 / (2.0 * sigma2))
    denom = counts @ dens  # denom[k] = sum_b counts[b] * dens(b -> k), > 0
    sample_w = counts / denom if estimator == "paper" else counts / denom**2
    w2 = np.empty((m, m))
    for a in range(m):
        row = dens[a] * sample_w
        for b in range(a, m):
            val = 2.5 * float(row @ dens[b])
            w2[a, b] = val
            w2[b, a] = val
    return KernelModel(float(sigma2), means, img.counts, w2, estimator)


@dataclass(frozen=True)
class LargeOracle:
    """Matrix-free view of the kernel-model weight matrix."""

    n: int
    class_of: np.ndarray
    lam: float
    graph: SmoothnessGraph = field(repr=False)
    model: KernelModel = field(repr=False)
    total_weight_sum: float

    def matvec(self, r: np.ndarray) -> np.ndarray:
        """W @ r in O(n + m^2) plus one sparse adjacency product."""
        r = np.asarray(r, dtype=np.float64)
        if r.shape != (self.n,):
            raise ValueError("vector length does not match oracle dimension")
        w2 = self.model.class_pair_w2
        phi = -2.5 / self.n * r.sum()
        class_sums = np.bincount(self.class_of, weights=r, minlength=len(w2))
        theta = w2 @ class_sums
        mu = self.graph.weighted_neighbor_sum(r)
        own = w2.diagonal()[self.class_of]
        return phi + theta[self.class_of] + self.lam * mu + (2.5 / self.n - own) * r

    def materialize_dense(self, cap: int = 2048) -> np.ndarray:
        """Explicit W for verification; refuses n > cap."""
        if self.n > cap:
            raise ValueError(f"n={self.n} exceeds materialization cap {cap}")
        w2 = self.model.class_pair_w2
        w = -2.5 / self.n + w2[self.class_of[:, None], self.class_of[None, :]]
        g = self.graph
        w[g.p, g.q] += self.lam * g.w
        w[g.q, g.p] += self.lam * g.w
        np.fill_diagonal(w, 0.0)
        return w

    def cut_value(self, labeling: Labeling) -> float:
        """Total weight crossing the labeling, via one matvec.

        As in the histogram oracle: the ordered-pair total versus the
        once-per-pair cut makes the identity (S_W - D' W D) / 4.
        """
        if labeling.n != self.n:
            raise ValueError("labeling length does not match oracle dimension")
        d = labeling.indicator()
        return 0.25 * (self.total_weight_sum - float(d @ self.matvec(d)))


def build_large_oracle(
    img: IndexedImage, graph: SmoothnessGraph, lam: float, model: KernelModel
) -> LargeOracle:
    """Assemble the oracle and its closed-form total weight."""
    if graph.n != img.total:
        raise ValueError("graph size does not match image size")
    if len(model.class_counts) != img.class_count:
        raise ValueError("kernel model does not match image class count")
    n = img.total
    counts = img.counts.astype(np.float64)
    w2 = model.class_pair_w2
    pair_total = float(counts @ w2 @ counts) - float((w2.diagonal() * counts).sum())
    total = -2.5 / n * n * (n - 1) + pair_total + 2.0 * lam * graph.total_weight
    return LargeOracle(n, img.class_of, float(lam), graph, model, total)
