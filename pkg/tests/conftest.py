"""Shared fixtures. The session-scoped warmup drives every jitted
kernel once so compilation happens before any timed assertion runs."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chamferfit import (
    LossConfig,
    Mesh,
    PointSet,
    it_metrics,
    loss_eval,
    make_icosphere,
    nn_tables,
    tri_tri_intersect,
)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    rng = np.random.default_rng(0)
    for dim in (2, 3):
        a = PointSet(rng.standard_normal((32, dim)))
        b = PointSet(rng.standard_normal((48, dim)))
        nn_tables(a, b)
        for variant in ("cd", "cd2_distance", "cd2_threshold", "cd2_percent"):
            loss_eval(a, b, LossConfig(variant=variant))
    tri_tri_intersect(rng.standard_normal((3, 3)), rng.standard_normal((3, 3)))
    it_metrics(make_icosphere(1))
    ring = PointSet(
        np.stack(
            [np.cos(np.linspace(0, 2 * np.pi, 8, endpoint=False)),
             np.sin(np.linspace(0, 2 * np.pi, 8, endpoint=False))],
            axis=1,
        )
    )
    edges = np.stack([np.arange(8), (np.arange(8) + 1) % 8], axis=1)
    it_metrics(Mesh(ring, edges))
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
