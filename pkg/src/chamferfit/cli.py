"""Command-line interface.

Subcommands: metrics (evaluate a mesh against a point file), deform (run
configured deformation experiments), bench (time the distance
computations), report (render SVG charts from run directories).

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from . import bench as bench_mod
from . import fileio, metrics, svgplot
from .deform import (
    TIMELINE_RHO,
    OptConfig,
    read_timeline_csv,
    run_sphere_fit,
    run_toy_chair,
    write_timeline_csv,
)
from .errors import ConfigError, FileFormatError, NumericalAbort
from .geometry import make_chair_2d
from .losses import LossConfig


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"bad numeric list {text!r}") from None
    if not values:
        raise ConfigError(f"empty numeric list {text!r}")
    return values


def _parse_ints(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None
    if not values:
        raise ConfigError(f"empty integer list {text!r}")
    return values


def _load_config(path: Path) -> dict:
    if not path.exists():
        raise FileFormatError(path, None, "config file not found")
    suffix = path.suffix.lower()
    try:
        if suffix == ".json":
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        if suffix == ".toml":
            with open(path, "rb") as fh:
                return tomllib.load(fh)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise FileFormatError(path, None, f"cannot parse config: {exc}") from None
    raise FileFormatError(path, None, f"unsupported config format {suffix!r}")


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def cmd_metrics(args) -> int:
    mesh = fileio.load_mesh(args.mesh)
    points = fileio.load_points(args.points)
    rho_list = _parse_floats(args.rho)
    for rho in rho_list:
        if rho <= 0:
            raise ConfigError(f"rho must be positive, got {rho}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = metrics.full_report(
        mesh, points, rho_list=rho_list, emd_n=args.emd_n, seed=args.seed
    )
    json_path = out / "report.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    csv_path = out / "report.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(metrics.report_csv_lines(report)) + "\n")
    print(f"wrote {json_path} and {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# deform
# ---------------------------------------------------------------------------

def _experiment_runs(cfg: dict, config_dir: Path, args) -> dict:
    problems = []
    kind = cfg.get("kind")
    if kind not in ("toy_chair", "sphere_fit"):
        problems.append(
            f"kind must be 'toy_chair' or 'sphere_fit', got {kind!r}"
        )
    runs = cfg.get("runs")
    if not isinstance(runs, list) or not runs:
        problems.append("runs must be a non-empty list of run blocks")
        runs = []
    mesh_path = None
    if kind == "sphere_fit":
        mesh_name = cfg.get("mesh")
        if not mesh_name:
            problems.append("sphere_fit needs a 'mesh' path")
        else:
            mesh_path = (config_dir / mesh_name).resolve()
            if not mesh_path.exists():
                problems.append(f"mesh path does not exist: {mesh_path}")
        n_points = cfg.get("n_points", 2000)
        if not isinstance(n_points, int) or n_points < 100:
            problems.append(f"n_points must be an integer >= 100, got {n_points!r}")
        subdivisions = cfg.get("subdivisions", 2)
        if not isinstance(subdivisions, int) or not 0 <= subdivisions <= 6:
            problems.append(
                f"subdivisions must be an integer in [0, 6], got {subdivisions!r}"
            )
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if not isinstance(seed, int):
        problems.append(f"seed must be an integer, got {seed!r}")
    opt_block = dict(cfg.get("opt", {}))
    opt_block["seed"] = seed
    try:
        opt_cfg = OptConfig.from_dict(opt_block)
    except (ConfigError, TypeError) as exc:
        problems.append(f"opt: {exc}")
        opt_cfg = None
    parsed_runs = []
    seen = set()
    for i, block in enumerate(runs):
        if not isinstance(block, dict):
            problems.append(f"runs[{i}] must be a table/object")
            continue
        block = dict(block)
        name = block.pop("name", block.get("variant", f"run{i}"))
        if name in seen:
            problems.append(f"duplicate run name {name!r}")
        seen.add(name)
        try:
            loss_cfg = LossConfig.from_dict(block)
        except (ConfigError, TypeError) as exc:
            problems.append(f"runs[{i}] ({name}): {exc}")
            continue
        parsed_runs.append((name, loss_cfg))
    if args.variant is not None:
        kept = [(n, lc) for n, lc in parsed_runs if lc.variant == args.variant]
        if not kept and not problems:
            problems.append(f"no run with variant {args.variant!r}")
        parsed_runs = kept
    if problems:
        raise ConfigError(problems)
    return {
        "kind": kind,
        "seed": seed,
        "opt_cfg": opt_cfg,
        "runs": parsed_runs,
        "mesh_path": mesh_path,
        "n_points": cfg.get("n_points", 2000),
        "subdivisions": cfg.get("subdivisions", 2),
    }


def _export_trace(trace, run_dir: Path, target) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    for iteration, mesh in trace.snapshots:
        if mesh.dim == 2:
            svgplot.write_frame_2d(mesh, target, run_dir / f"frame_{iteration:06d}.svg")
        else:
            fileio.save_obj(mesh, run_dir / f"frame_{iteration:06d}.obj")
    write_timeline_csv(trace, run_dir / "timeline.csv")


def cmd_deform(args) -> int:
    config_path = Path(args.config)
    cfg = _load_config(config_path)
    exp = _experiment_runs(cfg, config_path.parent, args)
    out = Path(args.out) if args.out is not None else Path(cfg.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    target_mesh = None
    if exp["kind"] == "sphere_fit":
        target_mesh = fileio.load_mesh(exp["mesh_path"])
    summary_runs = {}
    for name, loss_cfg in exp["runs"]:
        if exp["kind"] == "toy_chair":
            trace = run_toy_chair(loss_cfg, exp["opt_cfg"])
            target, _ = make_chair_2d()
        else:
            trace = run_sphere_fit(
                target_mesh,
                exp["n_points"],
                loss_cfg,
                exp["opt_cfg"],
                subdivisions=exp["subdivisions"],
            )
            target = None
        _export_trace(trace, out / name, target)
        final = trace.metrics_timeline[-1]
        vc = final.vc[TIMELINE_RHO]
        summary_runs[name] = {
            "variant": loss_cfg.variant,
            "iterations": len(trace.losses),
            "final_loss": final.loss,
            "n_vc": vc.n_vc,
            "n_vc_prime": vc.n_vc_prime,
            "f_it": final.it.f_it,
            "v_it": final.it.v_it,
        }
        print(
            f"{name}: {len(trace.losses)} iterations, final loss "
            f"{final.loss:.6g}, n_vc {vc.n_vc}, f_it {final.it.f_it}"
        )
    summary = {"kind": exp["kind"], "seed": exp["seed"], "runs": summary_runs}
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"wrote {out / 'summary.json'}")
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def cmd_bench(args) -> int:
    sizes = _parse_ints(args.sizes)
    variants = [v.strip() for v in args.variant.split(",") if v.strip()]
    if args.backends == "auto":
        backends = None
    elif args.backends == "both":
        backends = ["numba", "numpy"]
    else:
        backends = [args.backends]
    records = bench_mod.run_bench(
        sizes, args.reps, variants=variants, seed=args.seed, backends=backends
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "bench.csv"
    bench_mod.write_bench_csv(records, path)
    for r in records:
        print(f"{r.metric:24s} n={r.n:<8d} per-call {r.per_call_s * 1e3:10.3f} ms")
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def _timeline_charts(csv_path: Path, out: Path, prefix: str) -> list[Path]:
    data = read_timeline_csv(csv_path)
    iters = data["iteration"]
    written = []
    loss_svg = out / f"{prefix}loss_curve.svg"
    svgplot.line_chart(
        [("loss", iters, data["loss"])],
        loss_svg,
        title="Loss vs iteration",
        xlabel="iteration",
        ylabel="loss",
    )
    written.append(loss_svg)
    metrics_svg = out / f"{prefix}metrics_curve.svg"
    svgplot.line_chart(
        [
            ("n_vc", iters, data["n_vc"]),
            ("n_vc_prime", iters, data["n_vc_prime"]),
            ("f_it", iters, data["f_it"]),
            ("v_it", iters, data["v_it"]),
        ],
        metrics_svg,
        title="Quality metrics vs iteration",
        xlabel="iteration",
        ylabel="count",
    )
    written.append(metrics_svg)
    return written


def _bench_chart(csv_path: Path, out: Path) -> Path:
    records = bench_mod.read_bench_csv(csv_path)
    by_metric: dict[str, list[bench_mod.BenchRecord]] = {}
    for r in records:
        by_metric.setdefault(r.metric, []).append(r)
    series = []
    for metric, rows in by_metric.items():
        rows = sorted(rows, key=lambda r: r.n)
        series.append(
            (
                metric,
                [float(r.n) for r in rows],
                [max(r.per_call_s, 1e-12) for r in rows],
            )
        )
    path = out / "bench_times.svg"
    svgplot.line_chart(
        series,
        path,
        title="Per-call time vs set size",
        xlabel="n",
        ylabel="seconds",
        logx=True,
        logy=True,
    )
    return path


def cmd_report(args) -> int:
    trace_dir = Path(args.trace_dir)
    if not trace_dir.is_dir():
        raise FileFormatError(trace_dir, None, "not a directory")
    out = Path(args.out) if args.out is not None else trace_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []
    direct = trace_dir / "timeline.csv"
    if direct.exists():
        written += _timeline_charts(direct, out, "")
    for sub in sorted(trace_dir.iterdir()):
        nested = sub / "timeline.csv"
        if sub.is_dir() and nested.exists():
            written += _timeline_charts(nested, out, f"{sub.name}_")
    bench_csv = trace_dir / "bench.csv"
    if bench_csv.exists():
        written.append(_bench_chart(bench_csv, out))
    if not written:
        raise FileFormatError(
            trace_dir, None, "no timeline.csv or bench.csv found"
        )
    for path in written:
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(
        prog="chamferfit",
        description="Chamfer losses, mesh quality metrics, and template deformation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", help="evaluate a mesh against a point file")
    p.add_argument("mesh", help="mesh file (.obj or .off)")
    p.add_argument("points", help="point file (.xyz or .csv)")
    p.add_argument("--rho", default="0.5", help="comma list of clustering ratios")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="subsampling seed")
    p.add_argument("--emd-n", type=int, default=None, help="transport subsample size")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("deform", help="run deformation experiments from a config")
    p.add_argument("--config", required=True, help="TOML or JSON experiment config")
    p.add_argument("--out", default=None, help="output directory (overrides config)")
    p.add_argument("--seed", type=int, default=None, help="seed (overrides config)")
    p.add_argument("--variant", default=None, help="run only this loss variant")
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("bench", help="time the distance computations")
    p.add_argument("--sizes", default="256,512,1024", help="comma list, ascending")
    p.add_argument("--reps", type=int, default=5, help="timed repetitions per point")
    p.add_argument(
        "--variant",
        default=",".join(bench_mod.BENCH_VARIANTS),
        help="comma list of metrics to time",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument(
        "--backends",
        default="auto",
        choices=("auto", "both", "numba", "numpy"),
        help="kernel backends to contrast",
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="render SVG charts from a run directory")
    p.add_argument("trace_dir", help="directory written by deform or bench")
    p.add_argument("--out", default=None, help="output directory (default: trace dir)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1
    except FileFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalAbort as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
