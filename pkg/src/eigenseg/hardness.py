"""Set-partition reduction: build a 1-row image whose minimum energy decides it.

A positive integer multiset {x_1..x_m} summing to 2k maps to a 1 x 2k image
with x_i consecutive pixels of color class i. Restricting labelings to be
constant on each color block (the limit of infinitely strong intra-block
smoothness and zero inter-block smoothness), the minimum data energy over all
block subsets X' is

    min_X' (sum_{X'} x) ln (sum_{X'} x) + (sum_{~X'} x) ln (sum_{~X'} x)
           - sum_i x_i ln x_i

which equals 2k*ln(k) - sum_i x_i*ln(x_i) exactly when some subset sums to k.
Checking that equality decides the partition instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np
from scipy.special import xlogy

from .energy import exact_energy
from .imagecore import IndexedImage, Labeling
from .smoothness import SmoothnessGraph

BLOCK_EQUALITY_TOL = 1e-9


@dataclass(frozen=True)
class PartitionInstance:
    """Positive integers to split into two equal-sum halves."""

    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("instance needs at least one value")
        if any(v < 1 for v in self.values):
            raise ValueError("all values must be positive integers")

    @property
    def total(self) -> int:
        return sum(self.values)


def build_partition_image(inst: PartitionInstance) -> IndexedImage:
    """1 x total image: x_i consecutive pixels of class i, in index order."""
    class_of = np.repeat(np.arange(len(inst.values), dtype=np.int64), inst.values)
    counts = np.asarray(inst.values, dtype=np.int64)
    grays = np.arange(len(inst.values), dtype=np.float64)
    means = np.repeat(grays[:, None], 3, axis=1)
    return IndexedImage(inst.total, 1, class_of, counts, means)


def brute_force_min_energy(
    img: IndexedImage, graph: SmoothnessGraph, lam: float, cap: int = 22
) -> tuple[float, Labeling]:
    """Exhaustive exact-energy minimum over all 2^n labelings.

    Labelings are enumerated as integers with pixel 0 in the highest bit and
    fore=1; ties keep the lowest encoding.
    """
    n = img.total
    if n > cap:
        raise ValueError(f"{n} pixels exceeds the enumeration cap {cap}")
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    best_energy = None
    best_labeling = None
    for code in range(2**n):
        labeling = Labeling(((code >> shifts) & 1).astype(bool))
        total = exact_energy(img, labeling, graph, lam).total
        if best_energy is None or total < best_energy:
            best_energy = total
            best_labeling = labeling
    return best_energy, best_labeling


def block_coherent_min_energy(
    img: IndexedImage, graph: SmoothnessGraph, lam: float
) -> float:
    """Minimum exact energy over labelings that are constant on each color class.

    This realizes the reduction's smoothness limit analytically: 2^m subsets
    instead of 2^n labelings. Subset bit i selects class i as fore.
    """
    m = img.class_count
    if m > 24:
        raise ValueError("too many classes for subset enumeration")
    best = None
    for mask in range(2**m):
        fore_classes = np.array([(mask >> i) & 1 for i in range(m)], dtype=bool)
        labeling = Labeling(fore_classes[img.class_of])
        total = exact_energy(img, labeling, graph, lam).total
        if best is None or total < best:
            best = total
    return best


def brute_force_blocks(inst: PartitionInstance) -> float:
    """Minimum block data energy over all 2^m subsets of the instance."""
    m = len(inst.values)
    if m > 24:
        raise ValueError("too many values for subset enumeration")
    sums = np.zeros(1, dtype=np.int64)
    for x in inst.values:
        sums = np.concatenate([sums, sums + x])
    s0 = sums
    s1 = inst.total - sums
    base = float(xlogy(np.asarray(inst.values), np.asarray(inst.values)).sum())
    values = xlogy(s0, s0) + xlogy(s1, s1) - base
    return float(values.min())


def decide_partition(inst: PartitionInstance, tol: float = BLOCK_EQUALITY_TOL) -> bool:
    """True iff some subset of the values sums to exactly half the total.

    Odd totals are immediately false; otherwise the block minimum is compared
    against 2k*ln(k) - sum_i x_i*ln(x_i) within `tol`.
    """
    if inst.total % 2:
        return False
    k = inst.total // 2
    target = 2.0 * k * log(k) - float(
        xlogy(np.asarray(inst.values), np.asarray(inst.values)).sum()
    )
    return abs(brute_force_blocks(inst) - target) <= tol
