"""Numerical kernels: nearest-neighbor search and triangle intersection.

Every function here is compiled with numba when it is installed; without
numba the same sources run as plain Python. The vectorized brute-force
nearest-neighbor routine `nn_brute` is deliberately left uncompiled, it is
the numpy backend. Squared distances accumulate axis by axis in both
paths so the two backends produce identical floating-point results.

Conventions:
  - squared Euclidean distances throughout the NN routines
  - nearest-neighbor ties resolve to the lowest candidate index
  - orientation predicates snap to zero within EPS = 1e-12
  - triangle intersection treats closed triangles (touching counts)
"""

from __future__ import annotations

import numpy as np

from ._backend import HAS_NUMBA

if HAS_NUMBA:
    from numba import njit
else:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

LEAF = 16
EPS = 1e-12
EPS_AREA2 = 1e-28


# ---------------------------------------------------------------------------
# KD-tree over an (n, d) point array. The tree is three flat arrays: a
# permutation `idx`, per-node split axes stored at the slice midpoints, and
# the points themselves. Node over [lo, hi) stores its point at
# mid = (lo + hi) // 2 with the slice partitioned around it.
# ---------------------------------------------------------------------------

@njit(cache=True)
def _kd_select(pts, idx, lo, hi, k, ax):
    # Quickselect on idx[lo:hi) by pts[., ax] so idx[k] holds rank k - lo.
    left = lo
    right = hi - 1
    while left < right:
        mid = (left + right) >> 1
        pivot = pts[idx[mid], ax]
        i = left
        j = right
        while i <= j:
            while pts[idx[i], ax] < pivot:
                i += 1
            while pts[idx[j], ax] > pivot:
                j -= 1
            if i <= j:
                t = idx[i]
                idx[i] = idx[j]
                idx[j] = t
                i += 1
                j -= 1
        if k <= j:
            right = j
        elif k >= i:
            left = i
        else:
            break


@njit(cache=True)
def kd_build(pts, idx, axes):
    n = pts.shape[0]
    d = pts.shape[1]
    if n <= LEAF:
        return
    stack = np.empty((256, 2), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = n
    top = 1
    while top > 0:
        top -= 1
        lo = stack[top, 0]
        hi = stack[top, 1]
        if hi - lo <= LEAF:
            continue
        mid = (lo + hi) >> 1
        best_ax = 0
        best_ext = -1.0
        for a in range(d):
            mn = pts[idx[lo], a]
            mx = mn
            for i in range(lo + 1, hi):
                v = pts[idx[i], a]
                if v < mn:
                    mn = v
                if v > mx:
                    mx = v
            ext = mx - mn
            if ext > best_ext:
                best_ext = ext
                best_ax = a
        axes[mid] = best_ax
        _kd_select(pts, idx, lo, hi, mid, best_ax)
        stack[top, 0] = lo
        stack[top, 1] = mid
        top += 1
        stack[top, 0] = mid + 1
        stack[top, 1] = hi
        top += 1


@njit(cache=True)
def kd_query(pts, idx, axes, q, skip):
    # Single nearest neighbor of q, excluding point index `skip` (-1: none).
    # Subtrees are skipped only when their plane gap strictly exceeds the
    # current best, so equal-distance candidates stay reachable and the
    # lowest index wins ties.
    n = pts.shape[0]
    d = pts.shape[1]
    stack_lo = np.empty(256, np.int64)
    stack_hi = np.empty(256, np.int64)
    stack_pd = np.empty(256, np.float64)
    stack_lo[0] = 0
    stack_hi[0] = n
    stack_pd[0] = 0.0
    top = 1
    best = np.inf
    best_i = np.int64(-1)
    while top > 0:
        top -= 1
        lo = stack_lo[top]
        hi = stack_hi[top]
        if stack_pd[top] > best:
            continue
        while hi - lo > LEAF:
            mid = (lo + hi) >> 1
            pi = idx[mid]
            if pi != skip:
                d2 = 0.0
                for a in range(d):
                    t = q[a] - pts[pi, a]
                    d2 += t * t
                if d2 < best or (d2 == best and pi < best_i):
                    best = d2
                    best_i = pi
            ax = axes[mid]
            diff = q[ax] - pts[pi, ax]
            dd = diff * diff
            if diff < 0.0:
                stack_lo[top] = mid + 1
                stack_hi[top] = hi
                stack_pd[top] = dd
                top += 1
                hi = mid
            else:
                stack_lo[top] = lo
                stack_hi[top] = mid
                stack_pd[top] = dd
                top += 1
                lo = mid + 1
        for ii in range(lo, hi):
            pi = idx[ii]
            if pi == skip:
                continue
            d2 = 0.0
            for a in range(d):
                t = q[a] - pts[pi, a]
                d2 += t * t
            if d2 < best or (d2 == best and pi < best_i):
                best = d2
                best_i = pi
    return best, best_i


@njit(cache=True)
def kd_query_many(pts, idx, axes, queries, self_mode):
    # self_mode: queries is the indexed array itself; row r skips index r.
    nq = queries.shape[0]
    out_d = np.empty(nq, np.float64)
    out_i = np.empty(nq, np.int64)
    for r in range(nq):
        skip = r if self_mode else -1
        best, bi = kd_query(pts, idx, axes, queries[r], skip)
        out_d[r] = best
        out_i[r] = bi
    return out_d, out_i


def nn_brute(queries, ref, self_mode=False):
    """Chunked brute-force nearest neighbors (the numpy backend).

    Returns (squared distances, indices); ties take the lowest index via
    argmin's first-occurrence rule. With self_mode the diagonal (same row)
    is masked out; queries must then be the ref array itself.
    """
    nq, d = queries.shape
    nr = ref.shape[0]
    out_d = np.empty(nq, np.float64)
    out_i = np.empty(nq, np.int64)
    chunk = max(1, min(nq, 8_000_000 // max(nr, 1)))
    for s in range(0, nq, chunk):
        e = min(nq, s + chunk)
        q = queries[s:e]
        diff = q[:, 0:1] - ref[:, 0]
        d2 = diff * diff
        for a in range(1, d):
            diff = q[:, a : a + 1] - ref[:, a]
            d2 += diff * diff
        if self_mode:
            rows = np.arange(e - s)
            d2[rows, s + rows] = np.inf
        am = np.argmin(d2, axis=1)
        out_i[s:e] = am
        out_d[s:e] = d2[np.arange(e - s), am]
    return out_d, out_i


# ---------------------------------------------------------------------------
# Orientation predicates and segment/triangle tests. 2D points are passed
# as scalars, 3D points as length-3 arrays.
# ---------------------------------------------------------------------------

@njit(cache=True)
def _sgn(x, eps):
    if x > eps:
        return 1
    if x < -eps:
        return -1
    return 0


@njit(cache=True)
def orient2d(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


@njit(cache=True)
def orient3d(a, b, c, d):
    # det of rows (a - d, b - d, c - d)
    adx = a[0] - d[0]
    ady = a[1] - d[1]
    adz = a[2] - d[2]
    bdx = b[0] - d[0]
    bdy = b[1] - d[1]
    bdz = b[2] - d[2]
    cdx = c[0] - d[0]
    cdy = c[1] - d[1]
    cdz = c[2] - d[2]
    return (
        adx * (bdy * cdz - bdz * cdy)
        - ady * (bdx * cdz - bdz * cdx)
        + adz * (bdx * cdy - bdy * cdx)
    )


@njit(cache=True)
def _on_seg_2d(px, py, qx, qy, ax, ay):
    # a assumed collinear with pq; bounding-box containment with slack
    lox = px if px < qx else qx
    hix = px if px > qx else qx
    loy = py if py < qy else qy
    hiy = py if py > qy else qy
    return (
        lox - EPS <= ax <= hix + EPS and loy - EPS <= ay <= hiy + EPS
    )


@njit(cache=True)
def seg_seg_2d_closed(px, py, qx, qy, ax, ay, bx, by):
    s1 = _sgn(orient2d(px, py, qx, qy, ax, ay), EPS)
    s2 = _sgn(orient2d(px, py, qx, qy, bx, by), EPS)
    s3 = _sgn(orient2d(ax, ay, bx, by, px, py), EPS)
    s4 = _sgn(orient2d(ax, ay, bx, by, qx, qy), EPS)
    if s1 * s2 < 0 and s3 * s4 < 0:
        return True
    if s1 == 0 and _on_seg_2d(px, py, qx, qy, ax, ay):
        return True
    if s2 == 0 and _on_seg_2d(px, py, qx, qy, bx, by):
        return True
    if s3 == 0 and _on_seg_2d(ax, ay, bx, by, px, py):
        return True
    if s4 == 0 and _on_seg_2d(ax, ay, bx, by, qx, qy):
        return True
    return False


@njit(cache=True)
def seg_seg_2d_proper(px, py, qx, qy, ax, ay, bx, by):
    # Interiors cross in a single point; touching does not count.
    s1 = _sgn(orient2d(px, py, qx, qy, ax, ay), EPS)
    s2 = _sgn(orient2d(px, py, qx, qy, bx, by), EPS)
    s3 = _sgn(orient2d(ax, ay, bx, by, px, py), EPS)
    s4 = _sgn(orient2d(ax, ay, bx, by, qx, qy), EPS)
    return s1 * s2 < 0 and s3 * s4 < 0


@njit(cache=True)
def point_in_tri_2d(px, py, ax, ay, bx, by, cx, cy):
    s1 = _sgn(orient2d(ax, ay, bx, by, px, py), EPS)
    s2 = _sgn(orient2d(bx, by, cx, cy, px, py), EPS)
    s3 = _sgn(orient2d(cx, cy, ax, ay, px, py), EPS)
    has_pos = s1 > 0 or s2 > 0 or s3 > 0
    has_neg = s1 < 0 or s2 < 0 or s3 < 0
    return not (has_pos and has_neg)


@njit(cache=True)
def _dominant_axis(nx, ny, nz):
    axn = abs(nx)
    ayn = abs(ny)
    azn = abs(nz)
    if axn >= ayn and axn >= azn:
        return 0
    if ayn >= azn:
        return 1
    return 2


@njit(cache=True)
def _proj_u(p, drop):
    if drop == 0:
        return p[1]
    return p[0]


@njit(cache=True)
def _proj_v(p, drop):
    if drop == 2:
        return p[1]
    return p[2]


@njit(cache=True)
def _tri_normal(t):
    ux = t[1, 0] - t[0, 0]
    uy = t[1, 1] - t[0, 1]
    uz = t[1, 2] - t[0, 2]
    vx = t[2, 0] - t[0, 0]
    vy = t[2, 1] - t[0, 1]
    vz = t[2, 2] - t[0, 2]
    return uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx


@njit(cache=True)
def _tri_overlap_2d_proj(t1, t2, drop):
    # Closed overlap of two coplanar triangles after dropping axis `drop`.
    for i in range(3):
        if point_in_tri_2d(
            _proj_u(t1[i], drop), _proj_v(t1[i], drop),
            _proj_u(t2[0], drop), _proj_v(t2[0], drop),
            _proj_u(t2[1], drop), _proj_v(t2[1], drop),
            _proj_u(t2[2], drop), _proj_v(t2[2], drop),
        ):
            return True
        if point_in_tri_2d(
            _proj_u(t2[i], drop), _proj_v(t2[i], drop),
            _proj_u(t1[0], drop), _proj_v(t1[0], drop),
            _proj_u(t1[1], drop), _proj_v(t1[1], drop),
            _proj_u(t1[2], drop), _proj_v(t1[2], drop),
        ):
            return True
    for i in range(3):
        i2 = (i + 1) % 3
        for j in range(3):
            j2 = (j + 1) % 3
            if seg_seg_2d_closed(
                _proj_u(t1[i], drop), _proj_v(t1[i], drop),
                _proj_u(t1[i2], drop), _proj_v(t1[i2], drop),
                _proj_u(t2[j], drop), _proj_v(t2[j], drop),
                _proj_u(t2[j2], drop), _proj_v(t2[j2], drop),
            ):
                return True
    return False


@njit(cache=True)
def _seg_tri_2d_proj(a, b, t, drop):
    # Closed segment-vs-triangle test in the projection dropping `drop`.
    au = _proj_u(a, drop)
    av = _proj_v(a, drop)
    bu = _proj_u(b, drop)
    bv = _proj_v(b, drop)
    t0u = _proj_u(t[0], drop)
    t0v = _proj_v(t[0], drop)
    t1u = _proj_u(t[1], drop)
    t1v = _proj_v(t[1], drop)
    t2u = _proj_u(t[2], drop)
    t2v = _proj_v(t[2], drop)
    if point_in_tri_2d(au, av, t0u, t0v, t1u, t1v, t2u, t2v):
        return True
    if point_in_tri_2d(bu, bv, t0u, t0v, t1u, t1v, t2u, t2v):
        return True
    if seg_seg_2d_closed(au, av, bu, bv, t0u, t0v, t1u, t1v):
        return True
    if seg_seg_2d_closed(au, av, bu, bv, t1u, t1v, t2u, t2v):
        return True
    if seg_seg_2d_closed(au, av, bu, bv, t2u, t2v, t0u, t0v):
        return True
    return False


@njit(cache=True)
def _point_in_tri_3d(p, t):
    # p assumed on the triangle's plane
    nx, ny, nz = _tri_normal(t)
    drop = _dominant_axis(nx, ny, nz)
    return point_in_tri_2d(
        _proj_u(p, drop), _proj_v(p, drop),
        _proj_u(t[0], drop), _proj_v(t[0], drop),
        _proj_u(t[1], drop), _proj_v(t[1], drop),
        _proj_u(t[2], drop), _proj_v(t[2], drop),
    )


@njit(cache=True)
def _dist2_3d(a, b):
    d2 = 0.0
    for c in range(3):
        t = a[c] - b[c]
        d2 += t * t
    return d2


@njit(cache=True)
def _point_on_seg_3d(p, a, b):
    abx = b[0] - a[0]
    aby = b[1] - a[1]
    abz = b[2] - a[2]
    apx = p[0] - a[0]
    apy = p[1] - a[1]
    apz = p[2] - a[2]
    cx = aby * apz - abz * apy
    cy = abz * apx - abx * apz
    cz = abx * apy - aby * apx
    if abs(cx) > EPS or abs(cy) > EPS or abs(cz) > EPS:
        return False
    for c in range(3):
        lo = a[c] if a[c] < b[c] else b[c]
        hi = a[c] if a[c] > b[c] else b[c]
        if p[c] < lo - EPS or p[c] > hi + EPS:
            return False
    return True


@njit(cache=True)
def _seg_seg_3d_closed(a, b, c, d):
    la = _dist2_3d(a, b)
    lc = _dist2_3d(c, d)
    if la < EPS_AREA2 and lc < EPS_AREA2:
        return _dist2_3d(a, c) <= EPS * EPS
    if la < EPS_AREA2:
        return _point_on_seg_3d(a, c, d)
    if lc < EPS_AREA2:
        return _point_on_seg_3d(c, a, b)
    if _sgn(orient3d(a, b, c, d), EPS) != 0:
        return False
    # common-plane normal; fall back through cross products until nonzero
    ux = b[0] - a[0]
    uy = b[1] - a[1]
    uz = b[2] - a[2]
    vx = d[0] - c[0]
    vy = d[1] - c[1]
    vz = d[2] - c[2]
    nx = uy * vz - uz * vy
    ny = uz * vx - ux * vz
    nz = ux * vy - uy * vx
    if nx * nx + ny * ny + nz * nz < EPS_AREA2:
        wx = c[0] - a[0]
        wy = c[1] - a[1]
        wz = c[2] - a[2]
        nx = uy * wz - uz * wy
        ny = uz * wx - ux * wz
        nz = ux * wy - uy * wx
    if nx * nx + ny * ny + nz * nz < EPS_AREA2:
        # all four points collinear: 1D interval overlap along dominant axis
        ax_ = _dominant_axis(ux, uy, uz)
        a1 = a[ax_]
        b1 = b[ax_]
        c1 = c[ax_]
        d1 = d[ax_]
        lo1 = a1 if a1 < b1 else b1
        hi1 = a1 if a1 > b1 else b1
        lo2 = c1 if c1 < d1 else d1
        hi2 = c1 if c1 > d1 else d1
        return lo1 - EPS <= hi2 and lo2 - EPS <= hi1
    drop = _dominant_axis(nx, ny, nz)
    return seg_seg_2d_closed(
        _proj_u(a, drop), _proj_v(a, drop),
        _proj_u(b, drop), _proj_v(b, drop),
        _proj_u(c, drop), _proj_v(c, drop),
        _proj_u(d, drop), _proj_v(d, drop),
    )


@njit(cache=True)
def _seg_tri_3d(a, b, t):
    # Closed segment against closed non-degenerate triangle.
    if _dist2_3d(a, b) < EPS_AREA2:
        da = orient3d(t[0], t[1], t[2], a)
        if _sgn(da, EPS) != 0:
            return False
        return _point_in_tri_3d(a, t)
    da = orient3d(t[0], t[1], t[2], a)
    db = orient3d(t[0], t[1], t[2], b)
    sa = _sgn(da, EPS)
    sb = _sgn(db, EPS)
    if sa == 0 and sb == 0:
        # segment lies in the triangle's plane
        nx, ny, nz = _tri_normal(t)
        drop = _dominant_axis(nx, ny, nz)
        return _seg_tri_2d_proj(a, b, t, drop)
    if sa == 0:
        return _point_in_tri_3d(a, t)
    if sb == 0:
        return _point_in_tri_3d(b, t)
    if sa * sb > 0:
        return False
    x = np.empty(3, np.float64)
    w = da / (da - db)
    for c in range(3):
        x[c] = a[c] + w * (b[c] - a[c])
    return _point_in_tri_3d(x, t)


@njit(cache=True)
def _degen_seg(t, out_a, out_b):
    # Longest side of a (possibly degenerate) triangle.
    d01 = _dist2_3d(t[0], t[1])
    d02 = _dist2_3d(t[0], t[2])
    d12 = _dist2_3d(t[1], t[2])
    if d01 >= d02 and d01 >= d12:
        i = 0
        j = 1
    elif d02 >= d12:
        i = 0
        j = 2
    else:
        i = 1
        j = 2
    for c in range(3):
        out_a[c] = t[i, c]
        out_b[c] = t[j, c]


@njit(cache=True)
def tri_tri_intersect_k(t1, t2):
    """True iff the closed triangles t1, t2 ((3,3) arrays) share a point."""
    n1x, n1y, n1z = _tri_normal(t1)
    n2x, n2y, n2z = _tri_normal(t2)
    a1 = n1x * n1x + n1y * n1y + n1z * n1z
    a2 = n2x * n2x + n2y * n2y + n2z * n2z
    deg1 = a1 < EPS_AREA2
    deg2 = a2 < EPS_AREA2
    if deg1 or deg2:
        sa = np.empty(3, np.float64)
        sb = np.empty(3, np.float64)
        if deg1 and deg2:
            ta = np.empty(3, np.float64)
            tb = np.empty(3, np.float64)
            _degen_seg(t1, sa, sb)
            _degen_seg(t2, ta, tb)
            return _seg_seg_3d_closed(sa, sb, ta, tb)
        if deg1:
            _degen_seg(t1, sa, sb)
            return _seg_tri_3d(sa, sb, t2)
        _degen_seg(t2, sa, sb)
        return _seg_tri_3d(sa, sb, t1)

    d1 = np.empty(3, np.float64)
    s1 = np.empty(3, np.int64)
    for i in range(3):
        d1[i] = orient3d(t2[0], t2[1], t2[2], t1[i])
        s1[i] = _sgn(d1[i], EPS)
    if s1[0] > 0 and s1[1] > 0 and s1[2] > 0:
        return False
    if s1[0] < 0 and s1[1] < 0 and s1[2] < 0:
        return False
    d2 = np.empty(3, np.float64)
    s2 = np.empty(3, np.int64)
    for i in range(3):
        d2[i] = orient3d(t1[0], t1[1], t1[2], t2[i])
        s2[i] = _sgn(d2[i], EPS)
    if s2[0] > 0 and s2[1] > 0 and s2[2] > 0:
        return False
    if s2[0] < 0 and s2[1] < 0 and s2[2] < 0:
        return False

    if (s1[0] == 0 and s1[1] == 0 and s1[2] == 0) or (
        s2[0] == 0 and s2[1] == 0 and s2[2] == 0
    ):
        drop = _dominant_axis(n2x, n2y, n2z)
        return _tri_overlap_2d_proj(t1, t2, drop)

    # T1 crosses T2's plane: clip T1 to that plane (a point or segment),
    # then test the clip against T2 inside the plane. T1 ∩ T2 is contained
    # in this clip, so the test is exact for the non-coplanar case.
    P = np.empty((2, 3), np.float64)
    m = 0
    for i in range(3):
        if s1[i] == 0 and m < 2:
            for c in range(3):
                P[m, c] = t1[i, c]
            m += 1
    for e in range(3):
        j = (e + 1) % 3
        if s1[e] * s1[j] < 0 and m < 2:
            w = d1[e] / (d1[e] - d1[j])
            for c in range(3):
                P[m, c] = t1[e, c] + w * (t1[j, c] - t1[e, c])
            m += 1
    if m == 0:
        return False
    drop = _dominant_axis(n2x, n2y, n2z)
    if m == 1:
        return point_in_tri_2d(
            _proj_u(P[0], drop), _proj_v(P[0], drop),
            _proj_u(t2[0], drop), _proj_v(t2[0], drop),
            _proj_u(t2[1], drop), _proj_v(t2[1], drop),
            _proj_u(t2[2], drop), _proj_v(t2[2], drop),
        )
    return _seg_tri_2d_proj(P[0], P[1], t2, drop)


# ---------------------------------------------------------------------------
# Self-intersection candidate sweeps.
# ---------------------------------------------------------------------------

@njit(cache=True)
def it_sweep_3d(verts, faces, mins, maxs, order):
    """Intersecting face pairs sharing no vertex, via an x-sorted AABB sweep.

    `order` sorts faces by ascending AABB x-min. Returns an (m, 2) array of
    face-index pairs (low index first per pair).
    """
    nf = faces.shape[0]
    cap = 64
    out = np.empty((cap, 2), np.int64)
    m = 0
    t1 = np.empty((3, 3), np.float64)
    t2 = np.empty((3, 3), np.float64)
    for oi in range(nf):
        i = order[oi]
        xmax_i = maxs[i, 0]
        for oj in range(oi + 1, nf):
            j = order[oj]
            if mins[j, 0] > xmax_i:
                break
            if mins[j, 1] > maxs[i, 1] or maxs[j, 1] < mins[i, 1]:
                continue
            if mins[j, 2] > maxs[i, 2] or maxs[j, 2] < mins[i, 2]:
                continue
            shared = False
            for a in range(3):
                va = faces[i, a]
                if va == faces[j, 0] or va == faces[j, 1] or va == faces[j, 2]:
                    shared = True
                    break
            if shared:
                continue
            for a in range(3):
                for c in range(3):
                    t1[a, c] = verts[faces[i, a], c]
                    t2[a, c] = verts[faces[j, a], c]
            if tri_tri_intersect_k(t1, t2):
                if m == cap:
                    cap2 = cap * 2
                    out2 = np.empty((cap2, 2), np.int64)
                    for r in range(m):
                        out2[r, 0] = out[r, 0]
                        out2[r, 1] = out[r, 1]
                    out = out2
                    cap = cap2
                if i < j:
                    out[m, 0] = i
                    out[m, 1] = j
                else:
                    out[m, 0] = j
                    out[m, 1] = i
                m += 1
    return out[:m].copy()


@njit(cache=True)
def it_allpairs_2d(verts, edges):
    """Properly crossing edge pairs sharing no vertex, all pairs."""
    ne = edges.shape[0]
    cap = 64
    out = np.empty((cap, 2), np.int64)
    m = 0
    for i in range(ne):
        a0 = edges[i, 0]
        a1 = edges[i, 1]
        for j in range(i + 1, ne):
            b0 = edges[j, 0]
            b1 = edges[j, 1]
            if a0 == b0 or a0 == b1 or a1 == b0 or a1 == b1:
                continue
            if seg_seg_2d_proper(
                verts[a0, 0], verts[a0, 1],
                verts[a1, 0], verts[a1, 1],
                verts[b0, 0], verts[b0, 1],
                verts[b1, 0], verts[b1, 1],
            ):
                if m == cap:
                    cap2 = cap * 2
                    out2 = np.empty((cap2, 2), np.int64)
                    for r in range(m):
                        out2[r, 0] = out[r, 0]
                        out2[r, 1] = out[r, 1]
                    out = out2
                    cap = cap2
                out[m, 0] = i
                out[m, 1] = j
                m += 1
    return out[:m].copy()
