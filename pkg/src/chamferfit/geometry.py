"""Point and mesh data model, nearest-neighbor tables, template generators.

Distances inside NnTables are squared Euclidean; mean_nn_distance is the
one deliberate exception and returns an unsquared length, since it feeds
length-scale thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from ._backend import use_numba


def _as_points(points) -> np.ndarray:
    arr = np.ascontiguousarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError(f"points must be (n, 2) or (n, 3), got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("point set must contain at least one point")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite coordinate in point set")
    return arr


@dataclass(frozen=True)
class PointSet:
    """Ordered set of 2D or 3D points, coordinates finite, dtype float64."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class Mesh:
    """Vertices plus faces: triangles (index triples) in 3D, edge segments
    (index pairs) in 2D. Face indices are validated against the vertex
    count and may not repeat within a face."""

    vertices: PointSet
    faces: np.ndarray

    def __post_init__(self):
        faces = np.ascontiguousarray(self.faces, dtype=np.int64)
        width = 3 if self.vertices.dim == 3 else 2
        if faces.size == 0:
            faces = faces.reshape(0, width)
        if faces.ndim != 2 or faces.shape[1] != width:
            raise ValueError(
                f"faces must be (m, {width}) for dim {self.vertices.dim}, "
                f"got shape {faces.shape}"
            )
        n = len(self.vertices)
        if faces.size:
            if faces.min() < 0 or faces.max() >= n:
                raise ValueError("face index out of range")
            for c in range(width):
                for c2 in range(c + 1, width):
                    if (faces[:, c] == faces[:, c2]).any():
                        raise ValueError("face repeats a vertex index")
        object.__setattr__(self, "faces", faces)

    @property
    def dim(self) -> int:
        return self.vertices.dim


@dataclass
class NnTables:
    """Bidirectional nearest-neighbor tables between S1 and S2.

    dist1[i] is the squared distance from S1[i] to S2[index1[i]];
    dist2[i] is the squared distance from S2[i] to S1[index2[i]].
    """

    dist1: np.ndarray
    index1: np.ndarray
    dist2: np.ndarray
    index2: np.ndarray


class NnIndex:
    """Spatial index over one point set. Queries return exactly the
    brute-force nearest neighbor, ties broken by lowest index. The tree is
    built lazily and only for the compiled backend; the numpy backend
    scans."""

    def __init__(self, points: PointSet):
        if len(points) < 1:
            raise ValueError("empty point set")
        self._points = np.ascontiguousarray(points.points)
        self._idx = None
        self._axes = None

    @property
    def n(self) -> int:
        return self._points.shape[0]

    def _ensure_tree(self):
        if self._idx is None:
            n = self._points.shape[0]
            self._idx = np.arange(n, dtype=np.int64)
            self._axes = np.zeros(n, dtype=np.int64)
            K.kd_build(self._points, self._idx, self._axes)

    def query(self, queries: np.ndarray, self_mode: bool = False):
        """Nearest neighbor per query row: (squared distances, indices)."""
        queries = np.ascontiguousarray(queries, dtype=np.float64)
        if queries.ndim != 2 or queries.shape[1] != self._points.shape[1]:
            raise ValueError(
                f"queries must be (m, {self._points.shape[1]}), "
                f"got shape {queries.shape}"
            )
        if use_numba():
            self._ensure_tree()
            return K.kd_query_many(
                self._points, self._idx, self._axes, queries, self_mode
            )
        return K.nn_brute(queries, self._points, self_mode)

    def nearest(self, q):
        """Nearest neighbor of one point: (index, squared distance)."""
        d, i = self.query(np.asarray(q, dtype=np.float64).reshape(1, -1))
        return int(i[0]), float(d[0])


def build_nn_index(points: PointSet) -> NnIndex:
    return NnIndex(points)


def nn_tables(
    s1: PointSet,
    s2: PointSet,
    s1_index: NnIndex | None = None,
    s2_index: NnIndex | None = None,
) -> NnTables:
    """Bidirectional nearest-neighbor query between two point sets.

    Prebuilt indexes may be passed to avoid rebuilding when one side is
    queried repeatedly.
    """
    if len(s1) == 0 or len(s2) == 0:
        raise ValueError("empty point set")
    if s1.dim != s2.dim:
        raise ValueError(f"dimension mismatch: {s1.dim} vs {s2.dim}")
    i2 = s2_index if s2_index is not None else NnIndex(s2)
    i1 = s1_index if s1_index is not None else NnIndex(s1)
    dist1, index1 = i2.query(s1.points)
    dist2, index2 = i1.query(s2.points)
    return NnTables(dist1=dist1, index1=index1, dist2=dist2, index2=index2)


def mean_nn_distance(s: PointSet, index: NnIndex | None = None) -> float:
    """Average unsquared distance from each point to its nearest other
    point of the same set."""
    if len(s) < 2:
        raise ValueError("need at least 2 points")
    idx = index if index is not None else NnIndex(s)
    d2, _ = idx.query(s.points, self_mode=True)
    return float(np.sqrt(d2).mean())


# ---------------------------------------------------------------------------
# Template generators.
# ---------------------------------------------------------------------------

def make_icosphere(subdivisions: int) -> Mesh:
    """Unit-radius icosphere: subdivided icosahedron with vertices pushed
    onto the unit sphere. Level k has 10*4**k + 2 vertices and 20*4**k
    faces; level 4 gives 2562 vertices and 5120 faces."""
    if not 0 <= subdivisions <= 6:
        raise ValueError("subdivisions must be in [0, 6]")
    r = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            (-1, r, 0), (1, r, 0), (-1, -r, 0), (1, -r, 0),
            (0, -1, r), (0, 1, r), (0, -1, -r), (0, 1, -r),
            (r, 0, -1), (r, 0, 1), (-r, 0, -1), (-r, 0, 1),
        ],
        dtype=np.float64,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    vlist = [tuple(v) for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            got = cache.get(key)
            if got is not None:
                return got
            mx = (vlist[a][0] + vlist[b][0]) / 2.0
            my = (vlist[a][1] + vlist[b][1]) / 2.0
            mz = (vlist[a][2] + vlist[b][2]) / 2.0
            norm = math.sqrt(mx * mx + my * my + mz * mz)
            vlist.append((mx / norm, my / norm, mz / norm))
            cache[key] = len(vlist) - 1
            return cache[key]

        new_faces = []
        for (a, b, c) in faces:
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            new_faces.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = new_faces
    return Mesh(PointSet(np.array(vlist)), np.array(faces, dtype=np.int64))


def make_chair_2d() -> tuple[PointSet, Mesh]:
    """Toy 2D registration scenario: an 81-point chair profile (seat, back,
    two legs traced as polyline samples, all inside [-1, 1]^2) plus an
    80-vertex closed-loop template (circle of radius 0.8 centered at the
    chair centroid, 80 edge segments)."""
    back = np.stack(
        [np.full(36, -0.45), np.linspace(-0.5, 0.9, 36)], axis=1
    )
    seat = np.stack(
        [-0.45 + (0.9 / 23.0) * np.arange(1, 24), np.full(23, 0.35)], axis=1
    )
    leg = np.stack(
        [np.full(22, 0.45), 0.35 - (0.85 / 22.0) * np.arange(1, 23)], axis=1
    )
    s1 = np.concatenate([back, seat, leg])
    center = s1.mean(axis=0)
    theta = 2.0 * np.pi * np.arange(80) / 80.0
    ring = center + 0.8 * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    edges = np.stack([np.arange(80), (np.arange(80) + 1) % 80], axis=1)
    return PointSet(s1), Mesh(PointSet(ring), edges.astype(np.int64))


def sample_surface(mesh: Mesh, n: int, seed: int) -> PointSet:
    """n points drawn area-uniformly from a 3D triangle mesh: face chosen
    with probability proportional to area, barycentric-uniform within the
    face. Deterministic for a fixed seed."""
    if mesh.dim != 3:
        raise ValueError("sample_surface requires a 3D mesh")
    if n < 1:
        raise ValueError("n must be >= 1")
    v = mesh.vertices.points
    f = mesh.faces
    if len(f) == 0:
        raise ValueError("mesh has zero surface area")
    a = v[f[:, 0]]
    ab = v[f[:, 1]] - a
    ac = v[f[:, 2]] - a
    areas = 0.5 * np.linalg.norm(np.cross(ab, ac), axis=1)
    total = areas.sum()
    if total <= 0.0:
        raise ValueError("mesh has zero surface area")
    rng = np.random.default_rng(seed)
    fi = rng.choice(len(f), size=n, p=areas / total)
    u = rng.random(n)
    w = rng.random(n)
    fold = u + w > 1.0
    u[fold] = 1.0 - u[fold]
    w[fold] = 1.0 - w[fold]
    pts = a[fi] + u[:, None] * ab[fi] + w[:, None] * ac[fi]
    return PointSet(pts)
