"""Wall-time benchmark of the distance computations.

Times each requested metric on random same-size 3D point pairs with a
monotonic clock, after warm-up repetitions (10% of the requested count,
at least one) that are excluded from the totals.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConfigError
from .geometry import PointSet
from .losses import LossConfig, loss_eval
from .metrics import EMD_CAP, chamfer, emd_exact

BENCH_HEADER = "metric,n,reps,total_s,per_call_s"
BENCH_VARIANTS = ("cd", "cd2_distance", "cd2_threshold", "cd2_percent", "emd")


@dataclass
class BenchRecord:
    metric: str
    n: int
    reps: int
    total_s: float
    per_call_s: float


def _make_eval(variant: str):
    if variant == "cd":
        cfg = LossConfig(variant="cd")
        return lambda a, b: loss_eval(a, b, cfg).value
    if variant == "emd":
        return lambda a, b: emd_exact(a, b)
    if variant in ("cd2_distance", "cd2_threshold", "cd2_percent"):
        cfg = LossConfig(variant=variant)
        return lambda a, b: loss_eval(a, b, cfg).value
    if variant == "chamfer":
        return lambda a, b: chamfer(a, b).total
    raise ConfigError(f"unknown bench metric {variant!r}")


def run_bench(
    sizes: list[int],
    repetitions: int,
    variants: list[str] = list(BENCH_VARIANTS),
    seed: int = 0,
    backends: list[str] | None = None,
) -> list[BenchRecord]:
    """Benchmark each variant at each size; `backends` may name several
    kernel backends to contrast, labeling rows metric[backend]."""
    if repetitions < 1:
        raise ConfigError("repetitions must be >= 1")
    if sorted(sizes) != list(sizes):
        raise ConfigError("sizes must be ascending")
    if any(n < 1 for n in sizes):
        raise ConfigError("sizes must be positive")
    for v in variants:
        if v not in BENCH_VARIANTS:
            raise ConfigError(f"unknown bench metric {v!r}")
    if "emd" in variants and max(sizes) > EMD_CAP:
        raise ConfigError(
            f"emd sizes capped at {EMD_CAP}, got {max(sizes)}"
        )
    if backends is None:
        backend_list = [None]
    else:
        backend_list = list(backends)
    rng = np.random.default_rng(seed)
    records = []
    warm = max(1, repetitions // 10)
    prev_override = _backend._override
    try:
        for n in sizes:
            a = PointSet(rng.random((n, 3)))
            b = PointSet(rng.random((n, 3)))
            for variant in variants:
                fn = _make_eval(variant)
                for bk in backend_list:
                    if bk is not None:
                        _backend.set_backend(bk)
                    label = variant if bk is None else f"{variant}[{bk}]"
                    for _ in range(warm):
                        fn(a, b)
                    t0 = time.perf_counter()
                    for _ in range(repetitions):
                        fn(a, b)
                    total = time.perf_counter() - t0
                    records.append(
                        BenchRecord(
                            metric=label,
                            n=n,
                            reps=repetitions,
                            total_s=total,
                            per_call_s=total / repetitions,
                        )
                    )
    finally:
        if backends is not None:
            _backend._override = prev_override
    return records


def write_bench_csv(records: list[BenchRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(BENCH_HEADER + "\n")
        for r in records:
            fh.write(f"{r.metric},{r.n},{r.reps},{r.total_s!r},{r.per_call_s!r}\n")


def read_bench_csv(path) -> list[BenchRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != BENCH_HEADER:
        raise ValueError(f"{path}: missing bench header")
    if len(lines) == 1:
        raise ValueError(f"{path}: no data rows")
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise ValueError(f"{path}: malformed row {ln!r}")
        out.append(
            BenchRecord(
                metric=parts[0],
                n=int(parts[1]),
                reps=int(parts[2]),
                total_s=float(parts[3]),
                per_call_s=float(parts[4]),
            )
        )
    return out
