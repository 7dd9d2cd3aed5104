"""Evaluation metrics for point sets and deformable meshes.

Chamfer distance is the sum of the two mean nearest-neighbor squared
distances. EMD is the exact minimum-cost one-to-one assignment on
unsquared distances, mean-normalized. Vertex clustering counts vertices
whose nearest same-set neighbor sits closer than a length threshold
derived from the target's point spacing. The intersection metrics count
faces that intersect faces they share no vertex with.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from . import _kernels as K
from .geometry import Mesh, NnIndex, NnTables, PointSet, mean_nn_distance, nn_tables

EMD_CAP = 4096

DPVI_BIN_LABELS = (
    "0", "1", "2", "3-10", "11-20", "21-30", "31-40", "41-50", "51-max",
)
_DPVI_UPPER = np.array([0, 1, 2, 10, 20, 30, 40, 50], dtype=np.int64)


@dataclass
class ChamferResult:
    total: float
    part1: float
    part2: float
    tables: NnTables


@dataclass
class VcReport:
    n_vc: int
    n_vc_prime: int
    vc_vertices: np.ndarray
    vc_prime_vertices: np.ndarray
    sigma_vc: float
    rho: float


@dataclass
class ItReport:
    f_it: int
    v_it: int
    it_faces: np.ndarray


@dataclass
class MappingStats:
    """p_of_v[i] lists the target-point indices whose nearest vertex is i;
    v_of_p[j] lists the vertex indices whose nearest target point is j."""

    p_of_v: list[np.ndarray]
    v_of_p: list[np.ndarray]


@dataclass
class DpviHistogram:
    """Distribution of per-vertex incoming-point counts over the fixed
    bins 0, 1, 2, 3-10, ..., 51-max. `raw` holds the per-vertex counts;
    it is None for trial-averaged histograms, whose `counts` are means."""

    bins: tuple[str, ...]
    counts: np.ndarray
    raw: np.ndarray | None


def chamfer(
    s1: PointSet,
    s2: PointSet,
    s1_index: NnIndex | None = None,
    s2_index: NnIndex | None = None,
) -> ChamferResult:
    tables = nn_tables(s1, s2, s1_index=s1_index, s2_index=s2_index)
    part1 = float(tables.dist1.mean())
    part2 = float(tables.dist2.mean())
    return ChamferResult(total=part1 + part2, part1=part1, part2=part2, tables=tables)


def emd_exact(s1: PointSet, s2: PointSet, cap: int = EMD_CAP) -> float:
    """Exact one-to-one transport: (1/n) * min over bijections of the sum
    of unsquared distances."""
    if len(s1) != len(s2):
        raise ValueError(f"size mismatch: {len(s1)} vs {len(s2)}")
    if len(s1) == 0:
        raise ValueError("empty point set")
    if s1.dim != s2.dim:
        raise ValueError(f"dimension mismatch: {s1.dim} vs {s2.dim}")
    n = len(s1)
    if n > cap:
        raise ValueError(f"size {n} above cap {cap}")
    cost = cdist(s1.points, s2.points)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() / n)


def emd_subsampled(s1: PointSet, s2: PointSet, n: int, seed: int) -> float:
    """Deterministic uniform subsample of each set to n points, then exact
    transport."""
    if n == 0:
        raise ValueError("n must be >= 1")
    if n > min(len(s1), len(s2)):
        raise ValueError(f"n = {n} exceeds a set size")
    rng = np.random.default_rng(seed)
    a = s1.points[rng.permutation(len(s1))[:n]]
    b = s2.points[rng.permutation(len(s2))[:n]]
    return emd_exact(PointSet(a), PointSet(b))


def vc_metrics(
    s2: PointSet,
    s1: PointSet,
    rho: float,
    s1_index: NnIndex | None = None,
) -> VcReport:
    """Clustered vertices of S2 relative to the spacing of S1.

    A vertex belongs to the clustered set when its nearest same-set
    neighbor lies within sigma = rho * mean_nn_distance(s1), and to the
    strict subset when additionally it and that neighbor map to the same
    nearest point of S1.
    """
    if len(s2) < 2 or len(s1) < 2:
        raise ValueError("need at least 2 points in each set")
    if rho <= 0:
        raise ValueError("rho must be positive")
    if s2.dim != s1.dim:
        raise ValueError(f"dimension mismatch: {s2.dim} vs {s1.dim}")
    i1 = s1_index if s1_index is not None else NnIndex(s1)
    sigma = rho * mean_nn_distance(s1, index=i1)
    self_d2, self_i = NnIndex(s2).query(s2.points, self_mode=True)
    member = np.sqrt(self_d2) < sigma
    vc = np.flatnonzero(member)
    _, index2 = i1.query(s2.points)
    prime = vc[index2[vc] == index2[self_i[vc]]]
    return VcReport(
        n_vc=int(len(vc)),
        n_vc_prime=int(len(prime)),
        vc_vertices=vc,
        vc_prime_vertices=prime,
        sigma_vc=float(sigma),
        rho=float(rho),
    )


def tri_tri_intersect(a, b) -> bool:
    """Closed-triangle intersection test; touching counts. Degenerate
    (zero-area) triangles are handled as segments or points."""
    ta = np.ascontiguousarray(a, dtype=np.float64)
    tb = np.ascontiguousarray(b, dtype=np.float64)
    if ta.shape != (3, 3) or tb.shape != (3, 3):
        raise ValueError("triangles must be (3, 3) arrays")
    if not (np.isfinite(ta).all() and np.isfinite(tb).all()):
        raise ValueError("non-finite triangle vertex")
    return bool(K.tri_tri_intersect_k(ta, tb))


def _it_pairs_3d(mesh: Mesh) -> np.ndarray:
    verts = np.ascontiguousarray(mesh.vertices.points)
    faces = mesh.faces
    tri = verts[faces]
    mins = np.ascontiguousarray(tri.min(axis=1))
    maxs = np.ascontiguousarray(tri.max(axis=1))
    order = np.argsort(mins[:, 0], kind="stable")
    return K.it_sweep_3d(verts, faces, mins, maxs, order)


def it_metrics(mesh: Mesh) -> ItReport:
    """Faces intersecting some face they share no vertex with. In 2D the
    analogue counts edges properly crossing non-adjacent edges."""
    if len(mesh.faces) == 0:
        return ItReport(f_it=0, v_it=0, it_faces=np.empty(0, np.int64))
    if mesh.dim == 3:
        pairs = _it_pairs_3d(mesh)
    else:
        verts = np.ascontiguousarray(mesh.vertices.points)
        pairs = K.it_allpairs_2d(verts, mesh.faces)
    if len(pairs) == 0:
        return ItReport(f_it=0, v_it=0, it_faces=np.empty(0, np.int64))
    it_faces = np.unique(pairs.ravel())
    v_it = np.unique(mesh.faces[it_faces].ravel())
    return ItReport(f_it=int(len(it_faces)), v_it=int(len(v_it)), it_faces=it_faces)


def mapping_stats(tables: NnTables, n1: int, n2: int) -> MappingStats:
    """Invert the two nearest-neighbor index lists into per-vertex and
    per-point membership lists."""
    index1 = np.asarray(tables.index1)
    index2 = np.asarray(tables.index2)
    if len(index1) != n1 or len(index2) != n2:
        raise ValueError("tables inconsistent with stated sizes")
    if len(index1) and (index1.min() < 0 or index1.max() >= n2):
        raise ValueError("index1 entry out of range")
    if len(index2) and (index2.min() < 0 or index2.max() >= n1):
        raise ValueError("index2 entry out of range")
    p_of_v = _invert(index1, n2)
    v_of_p = _invert(index2, n1)
    return MappingStats(p_of_v=p_of_v, v_of_p=v_of_p)


def _invert(index: np.ndarray, n_targets: int) -> list[np.ndarray]:
    order = np.argsort(index, kind="stable")
    sorted_idx = index[order]
    starts = np.searchsorted(sorted_idx, np.arange(n_targets), side="left")
    ends = np.searchsorted(sorted_idx, np.arange(n_targets), side="right")
    return [order[s:e] for s, e in zip(starts, ends)]


def dpvi_counts(index1: np.ndarray, n2: int) -> np.ndarray:
    """Per-vertex count of incoming nearest-neighbor mappings."""
    return np.bincount(index1, minlength=n2).astype(np.int64)


def dpvi_histogram(stats: MappingStats) -> DpviHistogram:
    raw = np.array([len(p) for p in stats.p_of_v], dtype=np.int64)
    return DpviHistogram(
        bins=DPVI_BIN_LABELS, counts=_bin_dpvi(raw), raw=raw
    )


def _bin_dpvi(raw: np.ndarray) -> np.ndarray:
    bins = np.searchsorted(_DPVI_UPPER, raw, side="left")
    return np.bincount(bins, minlength=len(DPVI_BIN_LABELS)).astype(np.int64)


def opta_baseline(
    s1: PointSet, k: int, seed: int, trials: int = 1
) -> tuple[float, float, DpviHistogram]:
    """Reference metric levels for a perfect reconstruction of size k.

    Each trial draws a uniform k-point subsample of s1 as a stand-in
    reconstruction and measures Chamfer distance against the full set,
    subsampled exact transport, and the incoming-mapping histogram against
    an independent disjoint k-point reference subsample (the remaining
    points when fewer than k are left, or s1 itself when k equals |s1|).
    Returns means over trials.
    """
    if k == 0:
        raise ValueError("k must be >= 1")
    n = len(s1)
    if k > n:
        raise ValueError(f"k = {k} exceeds |s1| = {n}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    s1_index = NnIndex(s1)
    cd_sum = 0.0
    emd_sum = 0.0
    hist_sum = np.zeros(len(DPVI_BIN_LABELS), dtype=np.float64)
    for t in range(trials):
        perm = rng.permutation(n)
        pseudo = PointSet(s1.points[perm[:k]])
        cd_sum += chamfer(s1, pseudo, s1_index=s1_index).total
        emd_sum += emd_subsampled(
            s1, pseudo, n=min(k, EMD_CAP), seed=int(rng.integers(2**32))
        )
        if n - k >= k:
            ref = s1.points[perm[k : 2 * k]]
        elif n - k > 0:
            ref = s1.points[perm[k:]]
        else:
            ref = s1.points
        tab = nn_tables(PointSet(ref), pseudo)
        raw = dpvi_counts(tab.index1, k)
        hist_sum += _bin_dpvi(raw)
    counts = hist_sum / trials
    hist = DpviHistogram(bins=DPVI_BIN_LABELS, counts=counts, raw=None)
    return cd_sum / trials, emd_sum / trials, hist


# ---------------------------------------------------------------------------
# Report assembly and serialization.
# ---------------------------------------------------------------------------

def full_report(
    mesh: Mesh,
    points: PointSet,
    rho_list: tuple[float, ...] = (0.5,),
    emd_n: int | None = None,
    seed: int = 0,
) -> dict:
    """Evaluate every metric of a mesh against a target point set and
    assemble the report dictionary."""
    s2 = mesh.vertices
    s1_index = NnIndex(points)
    cd = chamfer(points, s2, s1_index=s1_index)
    if emd_n is None:
        emd_n = min(len(points), len(s2), 2048)
    emd = emd_subsampled(points, s2, n=emd_n, seed=seed)
    vcs = [vc_metrics(s2, points, rho, s1_index=s1_index) for rho in rho_list]
    it = it_metrics(mesh)
    stats = mapping_stats(cd.tables, n1=len(points), n2=len(s2))
    dpvi = dpvi_histogram(stats)
    vc_blocks = [
        {
            "n_vc": v.n_vc,
            "n_vc_prime": v.n_vc_prime,
            "sigma_vc": v.sigma_vc,
            "rho": v.rho,
        }
        for v in vcs
    ]
    return {
        "cd": {"total": cd.total, "part1": cd.part1, "part2": cd.part2},
        "emd": emd,
        "vc": vc_blocks[0] if len(vc_blocks) == 1 else vc_blocks,
        "it": {"f_it": it.f_it, "v_it": it.v_it},
        "dpvi": {"bins": list(DPVI_BIN_LABELS), "counts": dpvi.counts.tolist()},
    }


def report_csv_lines(report: dict) -> list[str]:
    """Compact one-row table: cd, emd, then clustering and intersection
    counts; clustering columns repeat per rho when several were measured."""
    vc = report["vc"]
    blocks = vc if isinstance(vc, list) else [vc]
    header = ["cd", "emd"]
    values = [repr(report["cd"]["total"]), repr(report["emd"])]
    for b in blocks:
        suffix = "" if len(blocks) == 1 else f"_rho{b['rho']:g}"
        header += [f"n_vc{suffix}", f"n_vc_prime{suffix}"]
        values += [str(b["n_vc"]), str(b["n_vc_prime"])]
    header += ["f_it", "v_it"]
    values += [str(report["it"]["f_it"]), str(report["it"]["v_it"])]
    return [",".join(header), ",".join(values)]
