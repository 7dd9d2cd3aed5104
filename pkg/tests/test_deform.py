"""Gradient-descent deformation: stopping rules, traces, experiment runs."""

import numpy as np
import pytest

from chamferfit import (
    ConfigError,
    LossConfig,
    Mesh,
    NumericalAbort,
    OptConfig,
    PointSet,
    chamfer,
    deform,
    make_chair_2d,
    make_icosphere,
    run_sphere_fit,
    run_toy_chair,
    sample_surface,
)
from chamferfit.deform import (
    TIMELINE_HEADER,
    read_timeline_csv,
    write_timeline_csv,
)


def _ring_mesh(n=16, radius=1.0, center=(0.0, 0.0)):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    pts = np.stack(
        [center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)], axis=1
    )
    edges = np.stack([np.arange(n), (np.arange(n) + 1) % n], axis=1)
    return Mesh(PointSet(pts), edges)


class TestOptConfig:
    def test_defaults(self):
        cfg = OptConfig()
        assert cfg.learning_rate == 1e-2
        assert cfg.max_iters == 2000
        assert cfg.loss_tol == 0.0
        assert cfg.snapshot_every == 100

    def test_validation_collects(self):
        with pytest.raises(ConfigError) as err:
            OptConfig(
                learning_rate=0.0, max_iters=0, loss_tol=-1.0, snapshot_every=0
            ).validate()
        assert len(err.value.problems) == 4

    def test_from_dict_unknown_key(self):
        with pytest.raises(ConfigError):
            OptConfig.from_dict({"lr": 0.1})


class TestDeform:
    def test_loss_decreases_on_ring_shrink(self, rng):
        target = PointSet(_ring_mesh(24, radius=1.0).vertices.points)
        template = _ring_mesh(24, radius=1.5)
        trace = deform(
            template, target, LossConfig(), OptConfig(learning_rate=0.5, max_iters=200)
        )
        assert trace.losses[-1] < trace.losses[0] * 0.01
        assert len(trace.final.vertices) == 24
        assert np.array_equal(trace.final.faces, template.faces)

    def test_fixed_point_stops_immediately(self):
        mesh = _ring_mesh(12)
        target = PointSet(mesh.vertices.points.copy())
        trace = deform(mesh, target, LossConfig(), OptConfig(max_iters=500))
        # gradient is exactly zero at the target: one evaluation, no motion
        assert len(trace.losses) == 1
        assert trace.losses[0] == 0.0
        assert np.array_equal(trace.final.vertices.points, mesh.vertices.points)

    def test_losses_indexed_by_update_count(self, rng):
        target = PointSet(rng.uniform(-1, 1, (30, 2)))
        template = _ring_mesh(10)
        trace = deform(
            template, target, LossConfig(), OptConfig(learning_rate=0.1, max_iters=5)
        )
        assert len(trace.losses) == 5
        direct = chamfer(target, PointSet(template.vertices.points)).total
        assert trace.losses[0] == direct

    def test_loss_tol_window_stop(self):
        target = PointSet(_ring_mesh(24).vertices.points)
        template = _ring_mesh(24, radius=1.4)
        trace = deform(
            template,
            target,
            LossConfig(),
            OptConfig(learning_rate=0.5, max_iters=5000, loss_tol=1e-10),
        )
        assert len(trace.losses) < 5000

    def test_loss_tol_zero_never_window_stops(self):
        target = PointSet(_ring_mesh(24).vertices.points)
        template = _ring_mesh(24, radius=1.4)
        trace = deform(
            template,
            target,
            LossConfig(),
            OptConfig(learning_rate=0.5, max_iters=300, loss_tol=0.0),
        )
        assert len(trace.losses) == 300

    def test_snapshot_iterations(self, rng):
        target = PointSet(rng.uniform(-1, 1, (30, 2)))
        template = _ring_mesh(12)
        trace = deform(
            template,
            target,
            LossConfig(),
            OptConfig(learning_rate=0.05, max_iters=25, snapshot_every=10),
        )
        assert [it for it, _ in trace.snapshots] == [0, 10, 20, 25]

    def test_numerical_abort_names_iteration_and_vertex(self):
        target = PointSet(np.array([[0.0, 0.0], [1.0, 0.0]]))
        template = _ring_mesh(8, radius=1e150)
        with pytest.raises(NumericalAbort) as err, np.errstate(over="ignore"):
            deform(
                template, target, LossConfig(),
                OptConfig(learning_rate=1e280, max_iters=50),
            )
        assert err.value.iteration >= 1
        assert "iteration" in str(err.value)

    def test_deterministic(self, rng):
        target = PointSet(rng.uniform(-1, 1, (40, 2)))
        template = _ring_mesh(16)
        cfg = OptConfig(learning_rate=0.1, max_iters=60)
        a = deform(template, target, LossConfig(), cfg)
        b = deform(template, target, LossConfig(), cfg)
        assert np.array_equal(a.final.vertices.points, b.final.vertices.points)
        assert np.array_equal(a.losses, b.losses)

    def test_connectivity_never_changes(self, rng):
        target = PointSet(rng.uniform(-1, 1, (30, 2)))
        template = _ring_mesh(12)
        trace = deform(
            template, target, LossConfig(),
            OptConfig(learning_rate=0.1, max_iters=30, snapshot_every=10),
        )
        for _, mesh in trace.snapshots:
            assert np.array_equal(mesh.faces, template.faces)


class TestToyChair:
    def test_trace_structure(self):
        trace = run_toy_chair(
            LossConfig(), OptConfig(learning_rate=0.1, max_iters=40, snapshot_every=20)
        )
        assert len(trace.losses) == 40
        timeline = trace.metrics_timeline
        assert [m.iteration for m in timeline] == [0, 20, 40]
        for m in timeline:
            assert set(m.vc) == {0.25, 0.5}
            assert m.it.f_it >= 0
            assert m.dpvi is None
        # snapshot at iteration k carries the loss of the state after k updates
        assert timeline[0].loss == trace.losses[0]
        assert timeline[1].loss == trace.losses[20]
        assert np.isfinite(timeline[-1].loss)

    def test_seed_rotates_start(self):
        a = run_toy_chair(LossConfig(), OptConfig(max_iters=1, seed=0))
        b = run_toy_chair(LossConfig(), OptConfig(max_iters=1, seed=1))
        assert not np.array_equal(
            a.snapshots[0][1].vertices.points, b.snapshots[0][1].vertices.points
        )
        # rotation preserves the ring's centroid and radius
        for trace in (a, b):
            start = trace.snapshots[0][1].vertices.points
            assert np.isclose(
                np.linalg.norm(start - start.mean(0), axis=1), 0.8
            ).all()


class TestSphereFit:
    def test_trace_structure(self):
        target = make_icosphere(2)
        trace = run_sphere_fit(
            target, 400, LossConfig(),
            OptConfig(learning_rate=0.5, max_iters=30, snapshot_every=15, seed=3),
            subdivisions=1,
        )
        assert len(trace.final.vertices) == 42
        timeline = trace.metrics_timeline
        assert timeline[-1].dpvi is not None
        assert timeline[-1].dpvi.counts.sum() == 42
        assert trace.losses[-1] < trace.losses[0]

    def test_template_scaled_outside_target(self):
        target = make_icosphere(1)
        trace = run_sphere_fit(
            target, 300, LossConfig(), OptConfig(max_iters=1, seed=0),
            subdivisions=0,
        )
        start = trace.snapshots[0][1].vertices.points
        sampled = sample_surface(target, 300, seed=0)
        radius = np.linalg.norm(
            sampled.points - sampled.points.mean(0), axis=1
        ).max()
        start_r = np.linalg.norm(start - sampled.points.mean(0), axis=1)
        assert np.isclose(start_r, 1.1 * radius).all()

    def test_validation(self):
        target = make_icosphere(1)
        with pytest.raises(ValueError):
            run_sphere_fit(target, 50, LossConfig(), OptConfig())
        _, chair_template = make_chair_2d()
        with pytest.raises(ValueError):
            run_sphere_fit(chair_template, 300, LossConfig(), OptConfig())


class TestTimelineCsv:
    def test_round_trip(self, tmp_path):
        trace = run_toy_chair(
            LossConfig(), OptConfig(learning_rate=0.1, max_iters=20, snapshot_every=10)
        )
        path = tmp_path / "timeline.csv"
        write_timeline_csv(trace, path)
        text = path.read_text().splitlines()
        assert text[0] == TIMELINE_HEADER
        assert len(text) == 4
        data = read_timeline_csv(path)
        assert data["iteration"].tolist() == [0, 10, 20]
        assert np.isfinite(data["loss"]).all()

    def test_missing_header(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="missing timeline header"):
            read_timeline_csv(path)

    def test_no_data_rows(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(TIMELINE_HEADER + "\n")
        with pytest.raises(ValueError, match="no data rows"):
            read_timeline_csv(path)

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text(TIMELINE_HEADER + "\n0,0.5,1,2\n")
        with pytest.raises(ValueError, match="malformed"):
            read_timeline_csv(path)
