"""Implicit pair-weight matrix for small (histogram) color spaces.

The n x n symmetric matrix W is never stored. Off-diagonal entries are

    w(p,q) = -5/(2n)  +  5/(2*n_i) if p,q share color class i  +  lam*S(p,q)
             if p,q are grid-adjacent,

with zero diagonal. The class structure makes W a rank-style update of the
sparse adjacency, so W @ r costs O(n + m + edges):

    phi      = -5/(2n) * sum(r)                  (global term)
    theta_i  = 5/(2*n_i) * sum of r over class i (per-class term)
    mu_k     = sum_j S(j,k) * r_j                (neighbor term)
    (W r)_k  = phi + theta_{class(k)} + lam*mu_k + (5/(2n) - 5/(2*n_class(k)))*r_k

where the trailing term removes the two self-pair contributions so the
product matches the zero-diagonal matrix exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .imagecore import IndexedImage, Labeling
from .smoothness import SmoothnessGraph


@dataclass(frozen=True)
class SmallOracle:
    """Matrix-free view of the histogram-model weight matrix."""

    n: int
    class_of: np.ndarray      # (n,) int64
    counts: np.ndarray        # (m,) int64
    lam: float
    graph: SmoothnessGraph = field(repr=False)
    class_coef: np.ndarray    # (m,) float64, 5/(2*n_i)
    total_weight_sum: float   # S_W = sum of all off-diagonal entries

    def matvec(self, r: np.ndarray) -> np.ndarray:
        """W @ r in O(n) plus one sparse adjacency product."""
        r = np.asarray(r, dtype=np.float64)
        if r.shape != (self.n,):
            raise ValueError("vector length does not match oracle dimension")
        phi = -2.5 / self.n * r.sum()
        class_sums = np.bincount(self.class_of, weights=r, minlength=len(self.counts))
        theta = self.class_coef * class_sums
        mu = self.graph.weighted_neighbor_sum(r)
        own = self.class_coef[self.class_of]
        return phi + theta[self.class_of] + self.lam * mu + (2.5 / self.n - own) * r

    def materialize_dense(self, cap: int = 2048) -> np.ndarray:
        """Explicit W for verification; refuses n > cap."""
        if self.n > cap:
            raise ValueError(f"n={self.n} exceeds materialization cap {cap}")
        w = np.full((self.n, self.n), -2.5 / self.n)
        same = self.class_of[:, None] == self.class_of[None, :]
        w += np.where(same, self.class_coef[self.class_of][:, None], 0.0)
        g = self.graph
        w[g.p, g.q] += self.lam * g.w
        w[g.q, g.p] += self.lam * g.w
        np.fill_diagonal(w, 0.0)
        return w

    def cut_value(self, labeling: Labeling) -> float:
        """Total weight crossing the labeling, via one matvec.

        total_weight_sum counts ordered pairs while the cut counts each
        crossing pair once, so the quadratic-form identity carries a quarter:
        sum_{p in F, q in B} w(p,q) = (S_W - D' W D) / 4.
        """
        if labeling.n != self.n:
            raise ValueError("labeling length does not match oracle dimension")
        d = labeling.indicator()
        return 0.25 * (self.total_weight_sum - float(d @ self.matvec(d)))


def build_small_oracle(img: IndexedImage, graph: SmoothnessGraph, lam: float) -> SmallOracle:
    """Precompute per-class coefficients and the closed-form total weight."""
    if graph.n != img.total:
        raise ValueError("graph size does not match image size")
    n = img.total
    counts = img.counts
    class_coef = 2.5 / counts
    total = (
        -2.5 / n * n * (n - 1)
        + float((class_coef * counts * (counts - 1)).sum())
        + 2.0 * lam * graph.total_weight
    )
    return SmallOracle(n, img.class_of, counts, float(lam), graph, class_coef, total)
