"""Matrix-free Lanczos solver for the top eigenpair, and labeling extraction.

Plain symmetric Lanczos with full reorthogonalization. After every step the
largest-algebraic Ritz pair of the growing tridiagonal matrix is extracted
with a direct solver and its residual estimated from the recurrence; once the
estimate clears the tolerance the Ritz vector is formed and the true residual
||W v - theta v|| is checked against tol * max(1, |theta|). If the Krylov cap
is hit first, the solver restarts from the current Ritz vector.

The largest algebraic (not largest magnitude) eigenvalue is targeted: the
weight matrices carry large negative entries, so the most negative eigenvalue
may dominate in magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .energy import EnergyBreakdown, approx_energy, exact_energy
from .imagecore import IndexedImage, Labeling
from .oracle_large import build_class_kernel, build_large_oracle
from .oracle_small import build_small_oracle
from .smoothness import SmoothnessGraph, cut_edge_count

DEFAULT_KRYLOV_CAP = 300
DEFAULT_RESTARTS = 10


@dataclass(frozen=True)
class EigenResult:
    """Largest-eigenvalue estimate with its unit eigenvector."""

    eigenvalue: float
    eigenvector: np.ndarray
    iterations: int
    residual_norm: float
    converged: bool


@dataclass(frozen=True)
class SegmentationResult:
    """Labeling plus the diagnostics of the run that produced it."""

    labeling: Labeling
    eigen: EigenResult = field(repr=False)
    exact: EnergyBreakdown
    approx: float
    approx_with_constants: float
    cut_value: float
    fore_count: int
    back_count: int
    boundary_edges: int


class _DenseOperator:
    """Adapter so explicit symmetric matrices can drive the solver."""

    def __init__(self, matrix: np.ndarray):
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.n = self.matrix.shape[0]

    def matvec(self, r: np.ndarray) -> np.ndarray:
        return self.matrix @ r


def _as_operator(oracle):
    if hasattr(oracle, "matvec") and hasattr(oracle, "n"):
        return oracle
    return _DenseOperator(oracle)


def _finite(w: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(w)):
        raise FloatingPointError("weight oracle produced non-finite values")
    return w


def _top_ritz(diag: np.ndarray, off: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest-algebraic eigenpair of a small symmetric tridiagonal matrix."""
    k = len(diag)
    if k == 1:
        return float(diag[0]), np.ones(1)
    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(k - 1, k - 1))
    return float(vals[0]), vecs[:, 0]


def _lanczos_pass(op, v0: np.ndarray, cap: int, tol: float):
    """One Lanczos factorization; returns (theta, ritz_vector, residual, steps, breakdown)."""
    n = op.n
    q_basis = np.empty((cap, n))
    diag = np.empty(cap)
    off = np.empty(max(cap - 1, 1))
    q = v0
    q_basis[0] = q
    w = _finite(op.matvec(q))
    diag[0] = float(q @ w)
    w = w - diag[0] * q
    j = 1
    while True:
        w -= q_basis[:j].T @ (q_basis[:j] @ w)  # full reorthogonalization
        beta = float(np.linalg.norm(w))
        theta, s = _top_ritz(diag[:j], off[: j - 1])
        breakdown = beta <= 1e-13 * max(1.0, abs(theta))
        if beta * abs(s[-1]) <= tol * max(1.0, abs(theta)) or breakdown or j >= cap:
            y = q_basis[:j].T @ s
            y /= np.linalg.norm(y)
            residual = float(np.linalg.norm(_finite(op.matvec(y)) - theta * y))
            return theta, y, residual, j, breakdown
        q_next = w / beta
        q_basis[j] = q_next
        off[j - 1] = beta
        w = _finite(op.matvec(q_next))
        diag[j] = float(q_next @ w)
        w = w - diag[j] * q_next - beta * q
        q = q_next
        j += 1


def lanczos_largest(
    oracle,
    tol: float = 1e-6,
    max_krylov: int | None = None,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
) -> EigenResult:
    """Largest-algebraic eigenpair of a symmetric weight oracle.

    `oracle` is anything exposing .n and .matvec (or an explicit square
    array). The start vector is seeded uniform random; the Krylov space is
    capped at min(n, 300) by default with up to `restarts` warm restarts from
    the best Ritz vector. A result that never meets the residual bound is
    returned with converged=False.
    """
    op = _as_operator(oracle)
    n = op.n
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n < 1:
        raise ValueError("oracle dimension must be at least 1")
    if n == 1:
        w = _finite(op.matvec(np.ones(1)))
        lam = float(w[0])
        return EigenResult(lam, np.ones(1), 1, 0.0, True)
    cap = min(n, DEFAULT_KRYLOV_CAP if max_krylov is None else max_krylov)
    cap = max(cap, 2)
    rng = np.random.default_rng(seed)
    v0 = rng.uniform(-1.0, 1.0, n)
    v0 /= np.linalg.norm(v0)
    steps = 0
    best = None
    for _ in range(restarts + 1):
        theta, y, residual, used, breakdown = _lanczos_pass(op, v0, cap, tol)
        steps += used
        if best is None or residual < best[0]:
            best = (residual, theta, y)
        if residual <= tol * max(1.0, abs(theta)):
            return EigenResult(theta, y, steps, residual, True)
        if breakdown:
            # invariant subspace without a converged target: fresh random start
            v0 = rng.uniform(-1.0, 1.0, n)
            v0 /= np.linalg.norm(v0)
        else:
            v0 = y
    residual, theta, y = best
    return EigenResult(theta, y, steps, residual, False)


def threshold_labels(vector: np.ndarray) -> Labeling:
    """Binary labeling from a relaxed indicator vector.

    The sign ambiguity is resolved first: if the largest-magnitude entry is
    negative the whole vector is flipped. Entries > 0 become fore, the rest
    back.
    """
    v = np.asarray(vector, dtype=np.float64)
    if v.size == 0:
        raise ValueError("empty vector")
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return Labeling(v > 0)


def segment(
    img: IndexedImage,
    graph: SmoothnessGraph,
    lam: float,
    mode: str = "small",
    *,
    sigma2: float | None = None,
    estimator: str = "consistent",
    tol: float = 1e-6,
    max_krylov: int | None = None,
    seed: int = 42,
    restarts: int = DEFAULT_RESTARTS,
) -> SegmentationResult:
    """Segment an indexed image end to end.

    mode='small' uses the histogram oracle; mode='large' builds the kernel
    class model (sigma2 required) and uses the kernel oracle. The eigenvector
    is thresholded into a labeling and scored with both the exact energy and
    the quadratic surrogate.
    """
    if mode == "small":
        oracle = build_small_oracle(img, graph, lam)
    elif mode == "large":
        if sigma2 is None:
            raise ValueError("large mode requires sigma2 (see estimate_sigma)")
        model = build_class_kernel(img, sigma2, estimator)
        oracle = build_large_oracle(img, graph, lam, model)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    eig = lanczos_largest(oracle, tol=tol, max_krylov=max_krylov, seed=seed, restarts=restarts)
    labeling = threshold_labels(eig.eigenvector)
    exact = exact_energy(img, labeling, graph, lam)
    approx = approx_energy(img, labeling, graph, lam)
    approx_total = approx_energy(img, labeling, graph, lam, include_constants=True)
    return SegmentationResult(
        labeling=labeling,
        eigen=eig,
        exact=exact,
        approx=approx,
        approx_with_constants=approx_total,
        cut_value=oracle.cut_value(labeling),
        fore_count=labeling.fore_count,
        back_count=labeling.back_count,
        boundary_edges=cut_edge_count(graph, labeling),
    )
