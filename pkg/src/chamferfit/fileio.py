"""Readers and writers for meshes and point sets.

Meshes: Wavefront OBJ (v/f records, 1-based indices, polygons fan-
triangulated on load) and OFF. Points: XYZ text (one point per line,
whitespace separated, 2 or 3 columns) and CSV. All loaders reject
non-finite values and report the offending file and line.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import FileFormatError
from .geometry import Mesh, PointSet


def _read_lines(path) -> list[str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.readlines()
    except OSError as exc:
        raise FileFormatError(path, None, f"cannot read file: {exc}") from None


def _parse_float(token: str, path, line_no: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise FileFormatError(path, line_no, f"not a number: {token!r}") from None
    if not math.isfinite(v):
        raise FileFormatError(path, line_no, f"non-finite value: {token!r}")
    return v


def _fan(indices: list[int], path, line_no: int) -> list[tuple[int, int, int]]:
    if len(indices) < 3:
        raise FileFormatError(path, line_no, "face with fewer than 3 vertices")
    return [(indices[0], indices[i], indices[i + 1]) for i in range(1, len(indices) - 1)]


def load_obj(path) -> Mesh:
    verts: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    for line_no, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "v":
            if len(parts) < 4:
                raise FileFormatError(path, line_no, "vertex needs 3 coordinates")
            verts.append(tuple(_parse_float(t, path, line_no) for t in parts[1:4]))
        elif parts[0] == "f":
            idx = []
            for tok in parts[1:]:
                head = tok.split("/")[0]
                try:
                    i = int(head)
                except ValueError:
                    raise FileFormatError(
                        path, line_no, f"bad face index: {tok!r}"
                    ) from None
                if i < 0:
                    i = len(verts) + 1 + i
                if i < 1 or i > len(verts):
                    raise FileFormatError(
                        path, line_no, f"face index {i} out of range"
                    )
                idx.append(i - 1)
            faces.extend(_fan(idx, path, line_no))
        # all other records (vt, vn, usemtl, o, g, s, mtllib...) are skipped
    if not verts:
        raise FileFormatError(path, None, "no vertices")
    try:
        return Mesh(PointSet(np.array(verts)), np.array(faces, np.int64).reshape(-1, 3))
    except ValueError as exc:
        raise FileFormatError(path, None, str(exc)) from None


def save_obj(mesh: Mesh, path) -> None:
    if mesh.dim != 3:
        raise ValueError("OBJ export requires a 3D mesh")
    with open(path, "w", encoding="utf-8") as fh:
        for v in mesh.vertices.points:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def load_off(path) -> Mesh:
    lines = _read_lines(path)
    body: list[tuple[int, str]] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        body.append((line_no, line))
    if not body:
        raise FileFormatError(path, None, "empty file")
    line_no, head = body[0]
    rest = body[1:]
    if head.startswith("OFF"):
        tail = head[3:].strip()
        if tail:
            counts_line = (line_no, tail)
        else:
            if not rest:
                raise FileFormatError(path, line_no, "missing counts line")
            counts_line, rest = rest[0], rest[1:]
    else:
        counts_line = (line_no, head)
    cl_no, cl = counts_line
    parts = cl.split()
    if len(parts) < 2:
        raise FileFormatError(path, cl_no, "counts line needs vertex and face counts")
    try:
        nv, nf = int(parts[0]), int(parts[1])
    except ValueError:
        raise FileFormatError(path, cl_no, f"bad counts line: {cl!r}") from None
    if len(rest) < nv + nf:
        raise FileFormatError(path, cl_no, "file shorter than declared counts")
    verts = []
    for k in range(nv):
        ln, line = rest[k]
        toks = line.split()
        if len(toks) < 3:
            raise FileFormatError(path, ln, "vertex needs 3 coordinates")
        verts.append(tuple(_parse_float(t, path, ln) for t in toks[:3]))
    faces: list[tuple[int, int, int]] = []
    for k in range(nf):
        ln, line = rest[nv + k]
        toks = line.split()
        try:
            cnt = int(toks[0])
            idx = [int(t) for t in toks[1 : 1 + cnt]]
        except (ValueError, IndexError):
            raise FileFormatError(path, ln, f"bad face line: {line!r}") from None
        if len(idx) != cnt:
            raise FileFormatError(path, ln, "face line shorter than its count")
        for i in idx:
            if i < 0 or i >= nv:
                raise FileFormatError(path, ln, f"face index {i} out of range")
        faces.extend(_fan(idx, path, ln))
    try:
        return Mesh(PointSet(np.array(verts)), np.array(faces, np.int64).reshape(-1, 3))
    except ValueError as exc:
        raise FileFormatError(path, None, str(exc)) from None


def load_xyz(path) -> PointSet:
    rows = []
    width = None
    for line_no, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if width is None:
            if len(toks) not in (2, 3):
                raise FileFormatError(
                    path, line_no, f"expected 2 or 3 columns, got {len(toks)}"
                )
            width = len(toks)
        elif len(toks) != width:
            raise FileFormatError(
                path, line_no, f"expected {width} columns, got {len(toks)}"
            )
        rows.append([_parse_float(t, path, line_no) for t in toks])
    if not rows:
        raise FileFormatError(path, None, "no points")
    return PointSet(np.array(rows))


def save_xyz(points: PointSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in points.points:
            fh.write(" ".join(f"{c:.17g}" for c in p) + "\n")


def load_csv_points(path) -> PointSet:
    rows = []
    width = None
    for line_no, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line:
            continue
        toks = [t.strip() for t in line.split(",") if t.strip() != ""]
        if not rows and width is None:
            # a non-numeric first row is a header
            try:
                [float(t) for t in toks]
            except ValueError:
                continue
        if width is None:
            if len(toks) not in (2, 3):
                raise FileFormatError(
                    path, line_no, f"expected 2 or 3 columns, got {len(toks)}"
                )
            width = len(toks)
        elif len(toks) != width:
            raise FileFormatError(
                path, line_no, f"expected {width} columns, got {len(toks)}"
            )
        rows.append([_parse_float(t, path, line_no) for t in toks])
    if not rows:
        raise FileFormatError(path, None, "no points")
    return PointSet(np.array(rows))


def load_points(path) -> PointSet:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return load_csv_points(path)
    return load_xyz(path)


def load_mesh(path) -> Mesh:
    suffix = Path(path).suffix.lower()
    if suffix == ".off":
        return load_off(path)
    if suffix == ".obj":
        return load_obj(path)
    raise FileFormatError(path, None, f"unsupported mesh format {suffix!r}")
