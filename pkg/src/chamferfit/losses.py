"""Two-pass Chamfer losses with analytic gradients over vertex positions.

Plain `cd` measures both mean nearest-neighbor squared distances. The
two-pass variants first run a full Chamfer pass, use it to pick vertices
(and their mapped points) to exclude, then recompute Chamfer on the
residual sets:

  - cd2_distance excludes the vertices with the smallest vertex-to-target
    distances: max(ceil(p_d * |S2|), count(dist2 < d_T)) of them.
  - cd2_threshold excludes vertices whose incoming-point count exceeds
    pvi_t, and symmetrically target points whose incoming-vertex count
    exceeds pvi_t.
  - cd2_percent excludes the top ceil(pvi_p * |S2|) vertices by incoming
    count, and the top ceil(s1_exclusion_fraction * |S1|) points.

Gradients flow only through the second pass, with nearest-neighbor
assignments held fixed; rows of excluded vertices are exactly zero. All
variants share one residual evaluation, so an empty exclusion reproduces
the plain loss bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, OverExclusionError
from .geometry import NnIndex, NnTables, PointSet, nn_tables

VARIANTS = ("cd", "cd2_distance", "cd2_threshold", "cd2_percent")


@dataclass
class LossConfig:
    variant: str = "cd"
    p_d: float = 0.3
    d_T: float = 1e-7
    pvi_t: int = 4
    pvi_p: float = 0.08
    s1_exclusion_fraction: float = 0.01

    def validate(self) -> None:
        problems = []
        if self.variant not in VARIANTS:
            problems.append(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not 0.0 <= self.p_d < 1.0:
            problems.append(f"p_d must be in [0, 1), got {self.p_d}")
        if self.d_T < 0.0:
            problems.append(f"d_T must be >= 0, got {self.d_T}")
        if int(self.pvi_t) != self.pvi_t or self.pvi_t < 1:
            problems.append(f"pvi_t must be a positive integer, got {self.pvi_t}")
        if not 0.0 <= self.pvi_p < 1.0:
            problems.append(f"pvi_p must be in [0, 1), got {self.pvi_p}")
        if not 0.0 <= self.s1_exclusion_fraction < 1.0:
            problems.append(
                "s1_exclusion_fraction must be in [0, 1), "
                f"got {self.s1_exclusion_fraction}"
            )
        if problems:
            raise ConfigError(problems)

    @classmethod
    def from_dict(cls, data: dict) -> "LossConfig":
        known = {
            "variant", "p_d", "d_T", "pvi_t", "pvi_p", "s1_exclusion_fraction",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(
                [f"unknown loss option {k!r}" for k in sorted(unknown)]
            )
        cfg = cls(**data)
        cfg.validate()
        return cfg


@dataclass
class LossResult:
    """value and per-vertex gradient, plus the exclusion bookkeeping.

    `grad` has one row per original vertex; rows of excluded vertices are
    zero. `residual_tables` indexes into the kept subsets (`kept_points`,
    `kept_vertices`), which are sorted ascending.
    """

    value: float
    grad: np.ndarray
    excluded_vertices: np.ndarray
    excluded_points: np.ndarray
    residual_tables: NnTables
    kept_points: np.ndarray = field(repr=False, default=None)
    kept_vertices: np.ndarray = field(repr=False, default=None)


def _residual_loss(
    s1: PointSet,
    s2: PointSet,
    excl_points: np.ndarray,
    excl_vertices: np.ndarray,
    s1_index: NnIndex | None,
) -> LossResult:
    n1, n2 = len(s1), len(s2)
    if len(excl_vertices) >= n2 or len(excl_points) >= n1:
        raise OverExclusionError(
            "over-exclusion: exclusion rule would empty a residual set "
            f"(|S1|={n1} minus {len(excl_points)}, |S2|={n2} minus "
            f"{len(excl_vertices)})"
        )
    if len(excl_points) == 0 and len(excl_vertices) == 0:
        keep1 = np.arange(n1)
        keep2 = np.arange(n2)
        s1r, s2r = s1, s2
        idx1 = s1_index
    else:
        keep1 = np.setdiff1d(np.arange(n1), excl_points)
        keep2 = np.setdiff1d(np.arange(n2), excl_vertices)
        s1r = PointSet(s1.points[keep1])
        s2r = PointSet(s2.points[keep2])
        idx1 = None
    tables = nn_tables(s1r, s2r, s1_index=idx1)
    part1 = float(tables.dist1.mean())
    part2 = float(tables.dist2.mean())
    n1k, n2k = len(keep1), len(keep2)
    grad_local = (2.0 / n2k) * (s2r.points - s1r.points[tables.index2])
    np.add.at(
        grad_local,
        tables.index1,
        (2.0 / n1k) * (s2r.points[tables.index1] - s1r.points),
    )
    grad = np.zeros_like(s2.points)
    grad[keep2] = grad_local
    return LossResult(
        value=part1 + part2,
        grad=grad,
        excluded_vertices=np.asarray(excl_vertices, dtype=np.int64),
        excluded_points=np.asarray(excl_points, dtype=np.int64),
        residual_tables=tables,
        kept_points=keep1,
        kept_vertices=keep2,
    )


_EMPTY = np.empty(0, dtype=np.int64)


def _check_inputs(s1: PointSet, s2: PointSet) -> None:
    if len(s1) == 0 or len(s2) == 0:
        raise ValueError("empty point set")
    if s1.dim != s2.dim:
        raise ValueError(f"dimension mismatch: {s1.dim} vs {s2.dim}")


def cd_loss(
    s1: PointSet, s2: PointSet, s1_index: NnIndex | None = None
) -> LossResult:
    """Plain Chamfer loss and its subgradient with assignments held fixed."""
    _check_inputs(s1, s2)
    return _residual_loss(s1, s2, _EMPTY, _EMPTY, s1_index)


def cd2_distance_loss(
    s1: PointSet, s2: PointSet, cfg: LossConfig, s1_index: NnIndex | None = None
) -> LossResult:
    """Two-pass loss excluding the closest-to-target vertices."""
    _check_inputs(s1, s2)
    if cfg.variant != "cd2_distance":
        raise ConfigError(f"expected variant cd2_distance, got {cfg.variant!r}")
    cfg.validate()
    first = nn_tables(s1, s2, s1_index=s1_index)
    n2 = len(s2)
    m = max(math.ceil(cfg.p_d * n2), int((first.dist2 < cfg.d_T).sum()))
    if m == 0:
        return _residual_loss(s1, s2, _EMPTY, _EMPTY, s1_index)
    order = np.argsort(first.dist2, kind="stable")
    excl_v = np.sort(order[:m])
    excl_p = np.unique(first.index2[excl_v])
    return _residual_loss(s1, s2, excl_p, excl_v, s1_index)


def cd2_mapping_loss(
    s1: PointSet, s2: PointSet, cfg: LossConfig, s1_index: NnIndex | None = None
) -> LossResult:
    """Two-pass loss excluding overloaded vertices (and points) by their
    incoming nearest-neighbor mapping counts."""
    _check_inputs(s1, s2)
    if cfg.variant not in ("cd2_threshold", "cd2_percent"):
        raise ConfigError(
            f"expected variant cd2_threshold or cd2_percent, got {cfg.variant!r}"
        )
    cfg.validate()
    first = nn_tables(s1, s2, s1_index=s1_index)
    n1, n2 = len(s1), len(s2)
    counts_v = np.bincount(first.index1, minlength=n2)
    counts_p = np.bincount(first.index2, minlength=n1)
    if cfg.variant == "cd2_threshold":
        excl_v = np.flatnonzero(counts_v > cfg.pvi_t)
        excl_p = np.flatnonzero(counts_p > cfg.pvi_t)
    else:
        m2 = math.ceil(cfg.pvi_p * n2)
        m1 = math.ceil(cfg.s1_exclusion_fraction * n1)
        excl_v = np.sort(np.argsort(-counts_v, kind="stable")[:m2])
        excl_p = np.sort(np.argsort(-counts_p, kind="stable")[:m1])
    return _residual_loss(s1, s2, excl_p, excl_v, s1_index)


def loss_eval(
    s1: PointSet, s2: PointSet, cfg: LossConfig, s1_index: NnIndex | None = None
) -> LossResult:
    """Dispatch to the loss matching cfg.variant."""
    cfg.validate()
    if cfg.variant == "cd":
        return cd_loss(s1, s2, s1_index=s1_index)
    if cfg.variant == "cd2_distance":
        return cd2_distance_loss(s1, s2, cfg, s1_index=s1_index)
    return cd2_mapping_loss(s1, s2, cfg, s1_index=s1_index)
