"""Exact labeling energy for histogram color models and its quadratic surrogate.

The data term rebuilds the fore/back color histograms from the labeling
itself, so the energy of a labeling L over an image with class counts n_i is

    E_D(L) = s0*ln(s0) + s1*ln(s1) - sum_i(n0_i*ln(n0_i) + n1_i*ln(n1_i))

with s0/s1 the fore/back sizes, n0_i/n1_i the per-class fore/back counts, and
the convention 0*ln(0) = 0. Replacing each group entropy term
x*ln(x) + (1-x)*ln(1-x) by -(5/2)*x*(1-x) - 1/12 turns E_D into a quadratic
in the per-class counts; the surrogate's labeling-dependent part is what the
weight oracles encode as a cut.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.special import xlogy

from .imagecore import IndexedImage, Labeling
from .smoothness import SmoothnessGraph, smoothness_cut


@dataclass(frozen=True)
class EnergyBreakdown:
    """Data and smoothness parts of one labeling energy, in nats."""

    data_term: float
    smoothness_term: float
    lam: float
    total: float


@dataclass(frozen=True)
class DeltaStats:
    """Moments of the entropy-vs-quadratic gap on [0, 1]."""

    mean: float
    mse: float


def _check_unit_interval(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if np.any((x < 0.0) | (x > 1.0)):
        raise ValueError("argument must lie in [0, 1]")
    return x


def f3(x):
    """x*ln(x) + (1-x)*ln(1-x) on [0, 1], with 0*ln(0) = 0."""
    x = _check_unit_interval(x)
    out = xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)
    return float(out) if out.ndim == 0 else out


def f3_approx(x):
    """Quadratic stand-in for f3: -(5/2)*x*(1-x) - 1/12."""
    x = _check_unit_interval(x)
    out = -2.5 * x * (1.0 - x) - 1.0 / 12.0
    return float(out) if out.ndim == 0 else out


def delta_stats(samples: int) -> DeltaStats:
    """Composite-Simpson moments of Delta(x) = -(5/2)*x*(1-x) - f3(x).

    Returns the mean of Delta over [0, 1] (analytically 1/12) and the mean of
    (Delta - 1/12)^2 (approximately 3e-4). `samples` is the number of panels.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 panels")
    panels = samples + (samples % 2)
    x = np.linspace(0.0, 1.0, panels + 1)
    delta = -2.5 * x * (1.0 - x) - f3(x)
    h = 1.0 / panels
    mean = float(simpson(delta, dx=h))
    mse = float(simpson((delta - 1.0 / 12.0) ** 2, dx=h))
    return DeltaStats(mean, mse)


def label_class_counts(img: IndexedImage, labeling: Labeling) -> tuple[np.ndarray, np.ndarray]:
    """Per-class fore counts n0_i and back counts n1_i."""
    if labeling.n != img.total:
        raise ValueError("labeling length does not match image size")
    n0 = np.bincount(img.class_of[labeling.fore], minlength=img.class_count)
    return n0, img.counts - n0


def color_entropy(img: IndexedImage) -> float:
    """n*H of the class histogram: n*ln(n) - sum_i n_i*ln(n_i).

    This is the data term of the two degenerate all-one-side labelings, and
    the constant dropped when reducing the surrogate to its cut form.
    """
    n = img.total
    return float(xlogy(n, n) - xlogy(img.counts, img.counts).sum())


def exact_energy(
    img: IndexedImage, labeling: Labeling, graph: SmoothnessGraph, lam: float
) -> EnergyBreakdown:
    """Exact histogram-model energy of a labeling."""
    n0, n1 = label_class_counts(img, labeling)
    s0 = int(n0.sum())
    s1 = img.total - s0
    data = float(
        xlogy(s0, s0) + xlogy(s1, s1) - (xlogy(n0, n0) + xlogy(n1, n1)).sum()
    )
    smooth = smoothness_cut(graph, labeling)
    total = data + lam * smooth
    return EnergyBreakdown(data, smooth, lam, total)


def approx_energy(
    img: IndexedImage,
    labeling: Labeling,
    graph: SmoothnessGraph,
    lam: float,
    include_constants: bool = False,
) -> float:
    """Quadratic surrogate energy of a labeling.

    By default returns only the labeling-dependent part,

        -(5/(2n))*s0*(n-s0) + sum_i (5/(2n_i))*n0_i*(n_i-n0_i) + lam*cut,

    which is what the weight oracles realize as a graph cut. With
    include_constants=True the dropped labeling-independent constant (the
    class-histogram entropy) is added back so the value is directly
    comparable to exact_energy.
    """
    n0, _ = label_class_counts(img, labeling)
    n = img.total
    s0 = int(n0.sum())
    value = (
        -2.5 / n * s0 * (n - s0)
        + float((2.5 / img.counts * n0 * (img.counts - n0)).sum())
        + lam * smoothness_cut(graph, labeling)
    )
    if include_constants:
        value += color_entropy(img)
    return float(value)
