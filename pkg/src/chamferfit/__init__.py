"""Two-pass Chamfer losses with mesh quality metrics and a gradient
descent deformation engine.

The central idea: a plain nearest-neighbour loss lets many template
vertices collapse onto the same target points. The two-pass variants
first find the over-subscribed or near-duplicate correspondences,
exclude them, and recompute the loss on the residual sets, which keeps
vertices spread over the target surface during optimisation.
"""

from ._backend import active_backend, set_backend, use_numba
from .bench import BenchRecord, run_bench
from .deform import (
    DeformTrace,
    OptConfig,
    SnapshotMetrics,
    deform,
    run_sphere_fit,
    run_toy_chair,
)
from .errors import (
    ConfigError,
    FileFormatError,
    NumericalAbort,
    OverExclusionError,
)
from .geometry import (
    Mesh,
    NnIndex,
    NnTables,
    PointSet,
    build_nn_index,
    make_chair_2d,
    make_icosphere,
    mean_nn_distance,
    nn_tables,
    sample_surface,
)
from .losses import LossConfig, LossResult, loss_eval
from .metrics import (
    ChamferResult,
    DpviHistogram,
    ItReport,
    MappingStats,
    VcReport,
    chamfer,
    dpvi_histogram,
    emd_exact,
    emd_subsampled,
    full_report,
    it_metrics,
    mapping_stats,
    opta_baseline,
    tri_tri_intersect,
    vc_metrics,
)

__version__ = "0.1.0"

__all__ = [
    "BenchRecord",
    "ChamferResult",
    "ConfigError",
    "DeformTrace",
    "DpviHistogram",
    "FileFormatError",
    "ItReport",
    "LossConfig",
    "LossResult",
    "MappingStats",
    "Mesh",
    "NnIndex",
    "NnTables",
    "NumericalAbort",
    "OptConfig",
    "OverExclusionError",
    "PointSet",
    "SnapshotMetrics",
    "VcReport",
    "active_backend",
    "build_nn_index",
    "chamfer",
    "deform",
    "dpvi_histogram",
    "emd_exact",
    "emd_subsampled",
    "full_report",
    "it_metrics",
    "loss_eval",
    "make_chair_2d",
    "make_icosphere",
    "mapping_stats",
    "mean_nn_distance",
    "nn_tables",
    "opta_baseline",
    "run_bench",
    "run_sphere_fit",
    "run_toy_chair",
    "sample_surface",
    "set_backend",
    "tri_tri_intersect",
    "use_numba",
    "vc_metrics",
]
