"""File loaders and writers: round-trips and error reporting."""

import numpy as np
import pytest

from chamferfit import FileFormatError, Mesh, PointSet, make_icosphere
from chamferfit.fileio import (
    load_csv_points,
    load_mesh,
    load_obj,
    load_off,
    load_points,
    load_xyz,
    save_obj,
    save_xyz,
)


class TestObj:
    def test_round_trip(self, tmp_path):
        mesh = make_icosphere(1)
        path = tmp_path / "m.obj"
        save_obj(mesh, path)
        back = load_obj(path)
        assert np.array_equal(back.vertices.points, mesh.vertices.points)
        assert np.array_equal(back.faces, mesh.faces)

    def test_one_based_and_negative_indices(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nf -3 -2 -1\n")
        mesh = load_obj(path)
        assert np.array_equal(mesh.faces, [[0, 1, 2], [0, 1, 2]])

    def test_fan_triangulation(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text(
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n"
        )
        mesh = load_obj(path)
        assert np.array_equal(mesh.faces, [[0, 1, 2], [0, 2, 3]])

    def test_skips_unknown_records(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text(
            "# comment\nvn 0 0 1\nvt 0 0\no thing\nv 0 0 0\nv 1 0 0\n"
            "v 0 1 0\ns off\nf 1 2 3\n"
        )
        mesh = load_obj(path)
        assert len(mesh.vertices) == 3 and len(mesh.faces) == 1

    def test_face_with_slashes(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text(
            "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/2/2 3/3/3\n"
        )
        assert np.array_equal(load_obj(path).faces, [[0, 1, 2]])

    def test_error_carries_path_and_line(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n")
        with pytest.raises(FileFormatError) as err:
            load_obj(path)
        assert "m.obj" in str(err.value) and ":4" in str(err.value)

    def test_rejects_nonfinite(self, tmp_path):
        path = tmp_path / "m.obj"
        path.write_text("v 0 0 nan\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        with pytest.raises(FileFormatError):
            load_obj(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileFormatError):
            load_obj(tmp_path / "absent.obj")


class TestOff:
    def test_basic(self, tmp_path):
        path = tmp_path / "m.off"
        path.write_text("OFF\n4 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n3 0 1 2\n3 0 2 3\n")
        mesh = load_off(path)
        assert len(mesh.vertices) == 4
        assert np.array_equal(mesh.faces, [[0, 1, 2], [0, 2, 3]])

    def test_counts_on_header_line(self, tmp_path):
        path = tmp_path / "m.off"
        path.write_text("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
        assert len(load_off(path).faces) == 1

    def test_quad_fan(self, tmp_path):
        path = tmp_path / "m.off"
        path.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
        assert np.array_equal(load_off(path).faces, [[0, 1, 2], [0, 2, 3]])

    def test_bad_header(self, tmp_path):
        path = tmp_path / "m.off"
        path.write_text("NOPE\n3 1 0\n")
        with pytest.raises(FileFormatError):
            load_off(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "m.off"
        path.write_text("OFF\n4 2 0\n0 0 0\n1 0 0\n")
        with pytest.raises(FileFormatError):
            load_off(path)


class TestXyz:
    def test_round_trip(self, tmp_path, rng):
        pts = PointSet(rng.standard_normal((20, 3)))
        path = tmp_path / "p.xyz"
        save_xyz(pts, path)
        back = load_xyz(path)
        assert np.array_equal(back.points, pts.points)

    def test_2d(self, tmp_path):
        path = tmp_path / "p.xyz"
        path.write_text("0 0\n1.5 2.5\n")
        back = load_xyz(path)
        assert back.dim == 2 and back.points[1, 1] == 2.5

    def test_inconsistent_width(self, tmp_path):
        path = tmp_path / "p.xyz"
        path.write_text("0 0 0\n1 1\n")
        with pytest.raises(FileFormatError) as err:
            load_xyz(path)
        assert ":2" in str(err.value)

    def test_bad_token(self, tmp_path):
        path = tmp_path / "p.xyz"
        path.write_text("0 0 zero\n")
        with pytest.raises(FileFormatError):
            load_xyz(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "p.xyz"
        path.write_text("\n")
        with pytest.raises(FileFormatError):
            load_xyz(path)


class TestCsv:
    def test_with_header(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("x,y,z\n0,0,0\n1,2,3\n")
        back = load_csv_points(path)
        assert back.points.shape == (2, 3) and back.points[1, 2] == 3.0

    def test_without_header(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("0.5,1.5\n2.5,3.5\n")
        assert load_csv_points(path).dim == 2

    def test_bad_cell_mid_file(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("0,0,0\n1,oops,3\n")
        with pytest.raises(FileFormatError) as err:
            load_csv_points(path)
        assert ":2" in str(err.value)


class TestDispatch:
    def test_load_points_by_suffix(self, tmp_path):
        (tmp_path / "p.xyz").write_text("1 2 3\n")
        (tmp_path / "p.csv").write_text("1,2,3\n")
        assert load_points(tmp_path / "p.xyz").points[0, 2] == 3.0
        assert load_points(tmp_path / "p.csv").points[0, 1] == 2.0

    def test_load_mesh_by_suffix(self, tmp_path):
        save_obj(make_icosphere(0), tmp_path / "m.obj")
        assert len(load_mesh(tmp_path / "m.obj").faces) == 20

    def test_unknown_suffix(self, tmp_path):
        (tmp_path / "p.bin").write_text("junk")
        with pytest.raises(FileFormatError):
            load_points(tmp_path / "p.bin")
        with pytest.raises(FileFormatError):
            load_mesh(tmp_path / "p.bin")

    def test_save_load_preserves_precision(self, tmp_path):
        pts = PointSet(np.array([[np.pi, np.e, np.sqrt(2)]]))
        save_xyz(pts, tmp_path / "p.xyz")
        assert np.array_equal(load_xyz(tmp_path / "p.xyz").points, pts.points)
        mesh = Mesh(
            PointSet(np.array([[np.pi, 0, 0], [0, np.e, 0], [0, 0, np.sqrt(2)]])),
            np.array([[0, 1, 2]]),
        )
        save_obj(mesh, tmp_path / "m.obj")
        assert np.array_equal(
            load_obj(tmp_path / "m.obj").vertices.points, mesh.vertices.points
        )
