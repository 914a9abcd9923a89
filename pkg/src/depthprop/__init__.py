"""depthprop: confidence-weighted depth fusion, pinhole back-projection,
and dilated, accelerated convolutional spatial propagation for refining
sparse-LiDAR depth maps, with KITTI-style metrics and file formats."""

from .affinity import (
    AffinityField,
    guided_affinity,
    neighbor_offsets,
    normalize,
    self_weight,
)
from .bench import BenchResult, make_bench_inputs, run_bench, run_pair
from .estimators import BackProjector, DepthRefiner, GuidedAffinity
from .fusion import fuse, fusion_weights
from .geometry import (
    CameraIntrinsics,
    PositionMap,
    back_project,
    min_pool,
    project,
    scale_intrinsics,
)
from .grids import make_grid, nearest_fill, valid_mask
from .io import (
    FormatError,
    PlaneContainer,
    read_affinity,
    read_depth_png,
    read_kitti_calib,
    read_planes,
    write_affinity,
    write_depth_png,
    write_planes,
)
from .metrics import MetricReport, evaluate, masked_l2
from .propagation import (
    DilationSchedule,
    PropagationConfig,
    propagate_accelerated,
    propagate_naive,
    schedule_c,
    translate,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityField",
    "BackProjector",
    "BenchResult",
    "CameraIntrinsics",
    "DepthRefiner",
    "DilationSchedule",
    "FormatError",
    "GuidedAffinity",
    "MetricReport",
    "PlaneContainer",
    "PositionMap",
    "PropagationConfig",
    "back_project",
    "evaluate",
    "fuse",
    "fusion_weights",
    "guided_affinity",
    "make_bench_inputs",
    "make_grid",
    "masked_l2",
    "min_pool",
    "nearest_fill",
    "neighbor_offsets",
    "normalize",
    "project",
    "propagate_accelerated",
    "propagate_naive",
    "read_affinity",
    "read_depth_png",
    "read_kitti_calib",
    "read_planes",
    "run_bench",
    "run_pair",
    "scale_intrinsics",
    "schedule_c",
    "self_weight",
    "translate",
    "valid_mask",
    "write_affinity",
    "write_depth_png",
    "write_planes",
]
