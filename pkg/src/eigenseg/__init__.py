"""Automatic binary image segmentation via the top eigenvector of an implicit
pixel-affinity matrix, with exact-energy oracles and a set-partition reduction
as built-in verification machinery."""

from .eigen import (
    EigenResult,
    SegmentationResult,
    lanczos_largest,
    segment,
    threshold_labels,
)
from .energy import (
    DeltaStats,
    EnergyBreakdown,
    approx_energy,
    color_entropy,
    delta_stats,
    exact_energy,
    f3,
    f3_approx,
)
from .hardness import (
    PartitionInstance,
    block_coherent_min_energy,
    brute_force_blocks,
    brute_force_min_energy,
    build_partition_image,
    decide_partition,
)
from .imagecore import (
    IndexedImage,
    Labeling,
    PnmError,
    PnmHeaderError,
    PnmMaxvalError,
    PnmTruncatedError,
    RawImage,
    labeling_from_mask,
    load_image,
    quantize_gray,
    rand_index,
    resize_max,
    write_mask,
    write_ppm,
)
from .oracle_large import (
    KernelModel,
    LargeOracle,
    build_class_kernel,
    build_large_oracle,
    estimate_sigma,
    kernel_density,
    kmeans_cluster,
)
from .oracle_small import SmallOracle, build_small_oracle
from .smoothness import (
    SmoothnessGraph,
    build_smoothness,
    cut_edge_count,
    grid_edges,
    smoothness_cut,
)

__version__ = "0.1.0"
