"""Command-line front end: theta, steady, spectrum, verify, evolve, sweep.

Configuration comes from an optional JSON file (--config) whose keys mirror
RunConfig field names; command-line flags override file values and the
merged effective config is echoed into the output directory as config.json.
All validation happens before any numerical work starts.

Exit codes: 0 success, 1 usage or solver error, 2 mathematically expected
negative result (subcritical growth rate).

Determinism: identical config + seed produce bit-identical output files.
The only exception is sweep's timing.jsonl, a wall-clock diagnostic kept
out of the deterministic result files on purpose.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import decay_rate, evolve, random_perturbation, write_trajectory_csv
from .elliptic import NewtonDivergenceError, SubcriticalError, solve_logistic
from .grid import (
    Domain,
    Field,
    Grid,
    build_grid,
    field_from_csv,
    fmt_g17,
    write_field_csv,
)
from .linstab import (
    DEGENERATE_WARN_BAND,
    degenerate_distance,
    s_parameter,
    stability_report_dict,
    verify_theorem,
    write_eigentable_csv,
)
from .grid import assemble_operator
from .model import ModelParams, synchronized_state, system_residual
from .spectral import EigenSolveError, eigenpairs, principal_eigenpair, write_spectrum_csv

__all__ = ["main", "RunConfig", "SweepSpec"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SUBCRITICAL = 2


class ConfigError(ValueError):
    """Invalid configuration; reported before any computation starts."""


@dataclass
class RunConfig:
    """Flat run configuration; JSON config files mirror these field names."""

    kind: str = "interval"
    extents: tuple = (math.pi,)
    resolution: tuple = (200,)
    a: object = 2.0  # number | "profile:sin" | "file:<path>"
    a0: float = 1.5
    a1: float = 0.5
    b: float = 0.5
    c: float = 1.0
    tol: float = 1e-10
    k: int = 6
    dt: float = 1e-3
    t_end: float = 10.0
    amplitude: float = 1e-3
    store_every: int = 10
    snapshot_times: tuple = ()
    functions: bool = False
    seed: int = 0
    out: str = "out"
    format: str = "csv"
    workers: int = 1


@dataclass
class SweepSpec:
    """Cartesian sweep axes over a, b, c, resolution; the template fixes the rest."""

    axes: dict
    template: RunConfig


def _parse_number(tok: str) -> float:
    t = tok.strip().lower()
    if t == "pi":
        return math.pi
    try:
        return float(t)
    except ValueError:
        raise ConfigError(f"cannot parse number {tok!r} (use a float or 'pi')")


def parse_domain(spec: str) -> tuple[str, tuple]:
    """'interval:0:pi' / 'interval:pi' / 'rectangle:0:1:0:2' / 'rectangle:1:2'."""
    parts = spec.split(":")
    kind = parts[0]
    vals = [_parse_number(p) for p in parts[1:]]
    if kind == "interval":
        if len(vals) == 1:
            return kind, (vals[0],)
        if len(vals) == 2:
            if vals[0] != 0.0:
                raise ConfigError("domains are anchored at 0: interval must start at 0")
            return kind, (vals[1] - vals[0],)
    elif kind == "rectangle":
        if len(vals) == 2:
            return kind, (vals[0], vals[1])
        if len(vals) == 4:
            if vals[0] != 0.0 or vals[2] != 0.0:
                raise ConfigError("domains are anchored at 0: rectangle must start at (0, 0)")
            return kind, (vals[1] - vals[0], vals[3] - vals[2])
    raise ConfigError(f"cannot parse domain spec {spec!r}")


def parse_resolution(spec: str) -> tuple:
    try:
        return tuple(int(p) for p in str(spec).split(","))
    except ValueError:
        raise ConfigError(f"cannot parse resolution {spec!r}")


def parse_value_list(spec: str) -> list[float]:
    """Comma list '0.5,1,2' or inclusive range 'start:stop:step'."""
    s = str(spec).strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {spec!r}")
        start, stop, step = (_parse_number(p) for p in parts)
        if step <= 0:
            raise ConfigError("range step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(max(n, 0))]
    return [_parse_number(p) for p in s.split(",")]


def build_growth_field(cfg: RunConfig, grid: Grid) -> tuple[object, Field]:
    """Resolve the a-spec into (params_a, field): const, sin profile, or file."""
    a = cfg.a
    if isinstance(a, str) and a.startswith("profile:"):
        name = a.split(":", 1)[1]
        if name == "const":
            return float(cfg.a0), Field.constant(grid, float(cfg.a0))
        if name == "sin":
            ext = grid.domain.extents

            def profile_1d(x):
                return cfg.a0 + cfg.a1 * np.sin(math.pi * x / ext[0])

            def profile_2d(x, y):
                return cfg.a0 + cfg.a1 * np.sin(math.pi * x / ext[0]) * np.sin(
                    math.pi * y / ext[1]
                )

            fld = Field.from_function(grid, profile_1d if grid.ndim == 1 else profile_2d)
            return fld, fld
        raise ConfigError(f"unknown profile {name!r} (known: const, sin)")
    if isinstance(a, str) and a.startswith("file:"):
        path = a.split(":", 1)[1]
        fld = field_from_csv(path, grid)
        return fld, fld
    val = float(a)
    return val, Field.constant(grid, val)


def _merge_config(file_cfg: dict, cli_overrides: dict) -> RunConfig:
    cfg = RunConfig()
    known = {f.name for f in dataclasses.fields(RunConfig)}
    for source, label in ((file_cfg, "config file"), (cli_overrides, "flag")):
        for key, val in source.items():
            if key in ("axes",):
                continue
            if key not in known:
                raise ConfigError(f"unknown {label} option {key!r}")
            setattr(cfg, key, val)
    cfg.extents = tuple(float(e) for e in cfg.extents)
    cfg.resolution = tuple(int(n) for n in cfg.resolution)
    cfg.snapshot_times = tuple(float(t) for t in cfg.snapshot_times)
    if isinstance(cfg.a, str) and not cfg.a.startswith(("profile:", "file:")):
        try:
            cfg.a = _parse_number(cfg.a)
        except ConfigError:
            raise ConfigError(f"cannot parse growth rate {cfg.a!r}")
    return cfg


def validate_config(cfg: RunConfig, command: str) -> None:
    """Check every numeric range and referenced file before any solve."""
    try:
        Domain(cfg.kind, cfg.extents, cfg.resolution)
    except ValueError as exc:
        raise ConfigError(str(exc))
    if isinstance(cfg.a, str):
        if cfg.a.startswith("file:"):
            path = Path(cfg.a.split(":", 1)[1])
            if not path.exists():
                raise ConfigError(f"growth-rate file not found: {path}")
        elif cfg.a.startswith("profile:"):
            if cfg.a.split(":", 1)[1] not in ("const", "sin"):
                raise ConfigError(f"unknown profile in {cfg.a!r}")
        else:
            try:
                float(cfg.a)
            except ValueError:
                raise ConfigError(f"cannot parse growth rate {cfg.a!r}")
    if command in ("steady", "verify", "evolve", "sweep"):
        if not 0.0 < cfg.b < 1.0:
            raise ConfigError(f"b must lie in (0, 1), got {cfg.b}")
        if cfg.c <= 0.0:
            raise ConfigError(f"c must be positive, got {cfg.c}")
    if cfg.tol <= 0:
        raise ConfigError(f"tol must be positive, got {cfg.tol}")
    if cfg.k < 1:
        raise ConfigError(f"k must be >= 1, got {cfg.k}")
    n_nodes = int(np.prod(cfg.resolution))
    if command == "spectrum" and cfg.k > n_nodes:
        raise ConfigError(f"k = {cfg.k} exceeds interior node count {n_nodes}")
    if command in ("verify", "sweep") and 2 * cfg.k > 2 * n_nodes:
        raise ConfigError(f"k = {cfg.k} exceeds interior node count {n_nodes}")
    if command == "evolve":
        if cfg.dt <= 0:
            raise ConfigError(f"dt must be positive, got {cfg.dt}")
        if cfg.t_end <= 0:
            raise ConfigError(f"t_end must be positive, got {cfg.t_end}")
        if cfg.amplitude < 0:
            raise ConfigError(f"amplitude must be nonnegative, got {cfg.amplitude}")
        if cfg.store_every < 1:
            raise ConfigError(f"store_every must be >= 1, got {cfg.store_every}")
    if command == "sweep" and isinstance(cfg.a, str):
        raise ConfigError("sweep requires a constant growth rate")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg.workers}")
    if cfg.seed < 0 or cfg.seed > 2**64 - 1:
        raise ConfigError(f"seed must be a u64, got {cfg.seed}")


def _json_dump(obj, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _echo_config(cfg: RunConfig, out: Path) -> None:
    _json_dump(dataclasses.asdict(cfg), out / "config.json")


def _write_field(fld: Field, base: Path, fmt: str) -> None:
    if fmt == "csv":
        write_field_csv(fld, base.with_suffix(".csv"))
    else:
        coords = fld.grid.coords()
        _json_dump(
            {
                "coords": [[c for c in row] for row in coords.tolist()],
                "values": fld.values.tolist(),
            },
            base.with_suffix(".json"),
        )


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _subcritical_message(cfg: RunConfig, exc: SubcriticalError) -> str:
    if not isinstance(cfg.a, str):
        critical = float(cfg.a) + exc.lambda1
        return f"subcritical: a <= lambda1 ~= {critical:.6g}"
    return f"subcritical: lambda1(a) = {exc.lambda1:.6g} >= 0"


def cmd_theta(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    _echo_config(cfg, out)
    grid = build_grid(Domain(cfg.kind, cfg.extents, cfg.resolution))
    _, a_field = build_growth_field(cfg, grid)
    try:
        sol = solve_logistic(grid, a_field, tol=cfg.tol)
    except SubcriticalError as exc:
        print(_subcritical_message(cfg, exc), file=sys.stderr)
        return EXIT_SUBCRITICAL
    except NewtonDivergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _write_field(sol.theta, out / "theta", cfg.format)
    _json_dump(
        {
            "residual_norm": sol.residual_norm,
            "newton_iterations": sol.newton_iterations,
            "lambda1_of_a": sol.lambda1_of_a,
        },
        out / "summary.json",
    )
    print(f"theta solved: residual {sol.residual_norm:.3e} in {sol.newton_iterations} Newton steps")
    return EXIT_OK


def cmd_steady(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    _echo_config(cfg, out)
    grid = build_grid(Domain(cfg.kind, cfg.extents, cfg.resolution))
    a_param, a_field = build_growth_field(cfg, grid)
    params = ModelParams(a=a_param, b=cfg.b, c=cfg.c)
    try:
        sol = solve_logistic(grid, a_field, tol=cfg.tol)
    except SubcriticalError as exc:
        print(_subcritical_message(cfg, exc), file=sys.stderr)
        return EXIT_SUBCRITICAL
    except NewtonDivergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_ERROR
    steady = synchronized_state(params, sol)
    r_u, r_v = system_residual(steady.u, steady.v, params)
    _write_field(steady.u, out / "u", cfg.format)
    _write_field(steady.v, out / "v", cfg.format)
    _json_dump(
        {"alpha": steady.alpha, "beta": steady.beta, "residuals": {"r_u": r_u, "r_v": r_v}},
        out / "summary.json",
    )
    print(f"synchronized state: alpha={steady.alpha:.6g} beta={steady.beta:.6g} "
          f"residuals=({r_u:.3e}, {r_v:.3e})")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    _echo_config(cfg, out)
    grid = build_grid(Domain(cfg.kind, cfg.extents, cfg.resolution))
    _, weight = build_growth_field(cfg, grid)
    try:
        spec = eigenpairs(assemble_operator(grid, weight), cfg.k, tol=cfg.tol)
    except EigenSolveError as exc:
        print(f"eigensolver failure: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if cfg.format == "csv":
        write_spectrum_csv(spec, out / "spectrum.csv")
    else:
        _json_dump(
            [
                {"index": i, "lambda": p.lam, "residual": p.residual}
                for i, p in enumerate(spec.pairs)
            ],
            out / "spectrum.json",
        )
    if cfg.functions:
        for i, p in enumerate(spec.pairs):
            _write_field(p.phi, out / f"eigenfunction_{i:03d}", cfg.format)
    print(f"computed {len(spec.pairs)} eigenvalues; lambda1 = {spec.pairs[0].lam:.9g}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    _echo_config(cfg, out)
    grid = build_grid(Domain(cfg.kind, cfg.extents, cfg.resolution))
    a_param, _ = build_growth_field(cfg, grid)
    params = ModelParams(a=a_param, b=cfg.b, c=cfg.c)
    report = verify_theorem(params, grid, cfg.k, tol=cfg.tol)
    _json_dump(stability_report_dict(report), out / "report.json")
    if report.coupled_eigs:
        write_eigentable_csv(report, out / "eigentable.csv")
    print(
        f"verdict: {report.verdict}"
        + (f" ({report.cause})" if report.cause else "")
        + (
            f"; mu1 = {report.mu1:.9g}, max mismatch = {report.max_rel_mismatch:.3e}"
            if report.coupled_eigs
            else ""
        )
        + (" [degenerate]" if report.degenerate else "")
        + (" [near-degenerate band]" if report.band_warning and not report.degenerate else "")
    )
    if report.verdict in ("stable", "unstable"):
        return EXIT_OK
    if report.cause and "no positive steady state" in report.cause:
        return EXIT_SUBCRITICAL
    return EXIT_ERROR


def cmd_evolve(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    _echo_config(cfg, out)
    grid = build_grid(Domain(cfg.kind, cfg.extents, cfg.resolution))
    a_param, a_field = build_growth_field(cfg, grid)
    params = ModelParams(a=a_param, b=cfg.b, c=cfg.c)
    try:
        sol = solve_logistic(grid, a_field, tol=cfg.tol)
    except SubcriticalError as exc:
        print(_subcritical_message(cfg, exc), file=sys.stderr)
        return EXIT_SUBCRITICAL
    except NewtonDivergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_ERROR
    steady = synchronized_state(params, sol)
    u0, v0 = random_perturbation(steady, cfg.amplitude, seed=cfg.seed)
    traj = evolve(u0, v0, params, dt=cfg.dt, t_end=cfg.t_end, store_every=cfg.store_every)
    write_trajectory_csv(traj, steady, out / "trajectory.csv")
    for i, tau in enumerate(cfg.snapshot_times):
        idx = int(np.argmin(np.abs(traj.times - tau)))
        u, v = traj.states[idx]
        _write_field(u, out / f"snapshot_u_{i:03d}", cfg.format)
        _write_field(v, out / f"snapshot_v_{i:03d}", cfg.format)
    # predicted slowest decay: smaller principal eigenvalue of the two families
    s1 = s_parameter(cfg.b, cfg.c)
    eig_tol = max(cfg.tol, 1e-8)
    lam_s1 = principal_eigenpair(
        assemble_operator(grid, sol.a - s1 * sol.theta), tol=eig_tol
    ).lam
    lam_2 = principal_eigenpair(
        assemble_operator(grid, sol.a - 2.0 * sol.theta), tol=eig_tol
    ).lam
    mu1 = min(lam_s1, lam_2)
    try:
        fit = decay_rate(traj, steady)
        fit_dict = {
            "rate": fit.rate,
            "r_squared": fit.r_squared,
            "window": list(fit.window),
            "n_samples": fit.n_samples,
            "monotone": fit.monotone,
            "mu1_predicted": mu1,
        }
        print(f"decay rate {fit.rate:.6g} (predicted -mu1 = {-mu1:.6g}), r^2 = {fit.r_squared:.6f}")
    except Exception as exc:  # fit is diagnostic; trajectory files already written
        fit_dict = {"error": str(exc), "mu1_predicted": mu1}
        print(f"decay fit unavailable: {exc}")
    _json_dump(fit_dict, out / "decay.json")
    return EXIT_OK


def _sweep_axes(cfg_dict: dict, args) -> dict:
    axes = {}
    file_axes = cfg_dict.get("axes", {}) if cfg_dict else {}
    for name in ("a", "b", "c", "resolution"):
        flag = getattr(args, f"sweep_{name}", None)
        if flag is not None:
            axes[name] = (
                [int(v) for v in parse_value_list(flag)]
                if name == "resolution"
                else parse_value_list(flag)
            )
        elif name in file_axes:
            vals = file_axes[name]
            if not isinstance(vals, list):
                raise ConfigError(f"sweep axis {name!r} must be a list")
            axes[name] = [int(v) for v in vals] if name == "resolution" else [float(v) for v in vals]
    return axes


def _sweep_job(payload: tuple) -> dict:
    """One verify job; returns the deterministic record plus wall time."""
    (a, b, c, n), kind, extents, k, tol = payload
    t0 = time.perf_counter()
    try:
        resolution = (n,) if kind == "interval" else (n, n)
        grid = build_grid(Domain(kind, extents, resolution))
        params = ModelParams(a=a, b=b, c=c)
        report = verify_theorem(params, grid, k, tol=tol)
        record = {
            "a": a,
            "b": b,
            "c": c,
            "resolution": n,
            "s": report.s_value,
            "degenerate": report.degenerate,
            "degenerate_band": report.band_warning,
            "mu1": report.mu1,
            "max_rel_mismatch": report.max_rel_mismatch,
            "max_imag": report.max_imag,
            "verdict": report.verdict,
            "cause": report.cause,
        }
    except Exception as exc:  # any failure becomes an inconclusive record
        record = {
            "a": a,
            "b": b,
            "c": c,
            "resolution": n,
            "s": s_parameter(b, c) if 0 < b < 1 and c > 0 else math.nan,
            "degenerate": False,
            "degenerate_band": False,
            "mu1": math.nan,
            "max_rel_mismatch": math.nan,
            "max_imag": math.nan,
            "verdict": "inconclusive",
            "cause": f"job failure: {exc}",
        }
    wall_ms = 1000.0 * (time.perf_counter() - t0)
    return {"record": record, "wall_time_ms": wall_ms}


def cmd_sweep(cfg: RunConfig, axes: dict) -> int:
    out = _outdir(cfg)
    _echo_config(cfg, out)
    for name, vals in axes.items():
        if len(vals) == 0:
            print(f"empty sweep: axis {name!r} has no values", file=sys.stderr)
            return EXIT_ERROR
    if not axes:
        print("empty sweep: no axes given", file=sys.stderr)
        return EXIT_ERROR

    a_vals = axes.get("a", [float(cfg.a)])
    b_vals = axes.get("b", [cfg.b])
    c_vals = axes.get("c", [cfg.c])
    n_vals = axes.get("resolution", [cfg.resolution[0]])
    for b in b_vals:
        if not 0 < b < 1:
            raise ConfigError(f"sweep b value {b} outside (0, 1)")
    for c in c_vals:
        if c <= 0:
            raise ConfigError(f"sweep c value {c} must be positive")
    for n in n_vals:
        if int(n) < 3:
            raise ConfigError(f"sweep resolution {n} too small")

    jobs = sorted(
        (float(a), float(b), float(c), int(n))
        for a in a_vals
        for b in b_vals
        for c in c_vals
        for n in n_vals
    )
    print(f"sweep: {len(jobs)} jobs "
          f"({len(a_vals)} a x {len(b_vals)} b x {len(c_vals)} c x {len(n_vals)} n)")
    near_degenerate = sum(
        1 for (_, b, c, _) in jobs if degenerate_distance(b, c) <= DEGENERATE_WARN_BAND
    )
    if near_degenerate:
        print(f"note: {near_degenerate} job(s) in the degenerate-locus band")

    payloads = [(job, cfg.kind, cfg.extents, cfg.k, cfg.tol) for job in jobs]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outputs = list(pool.map(_sweep_job, payloads))
    else:
        outputs = [_sweep_job(p) for p in payloads]

    records = [o["record"] for o in outputs]
    with open(out / "results.jsonl", "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True))
            fh.write("\n")
    with open(out / "timing.jsonl", "w") as fh:
        for job, o in zip(jobs, outputs):
            fh.write(json.dumps({"job": list(job), "wall_time_ms": o["wall_time_ms"]}))
            fh.write("\n")

    verdicts: dict[str, int] = {}
    for rec in records:
        verdicts[rec["verdict"]] = verdicts.get(rec["verdict"], 0) + 1
    mu1s = [rec["mu1"] for rec in records if not math.isnan(rec["mu1"])]
    summary = {
        "n_jobs": len(records),
        "min_mu1": min(mu1s) if mu1s else None,
        "verdicts": verdicts,
        "non_stable_jobs": [
            {"a": r["a"], "b": r["b"], "c": r["c"], "resolution": r["resolution"],
             "verdict": r["verdict"], "cause": r["cause"]}
            for r in records
            if r["verdict"] != "stable"
        ],
    }
    _json_dump(summary, out / "summary.json")
    print(f"sweep done: {verdicts}")
    return EXIT_OK if records else EXIT_ERROR


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file mirroring RunConfig fields")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=["csv", "json"], help="tabular output format")
    p.add_argument("--seed", type=int, help="64-bit seed for stochastic choices")
    p.add_argument("--workers", type=int, help="parallel workers (sweep)")
    p.add_argument("--domain", help="interval:0:pi | interval:L | rectangle:0:Lx:0:Ly")
    p.add_argument("--n", help="interior nodes per axis, e.g. 400 or 40,80")
    p.add_argument("--a", help="growth rate: number | profile:sin | file:<path>")
    p.add_argument("--a0", type=float, help="profile offset")
    p.add_argument("--a1", type=float, help="profile amplitude")
    p.add_argument("--b", type=float, help="predation rate, in (0,1)")
    p.add_argument("--c", type=float, help="conversion rate, > 0")
    p.add_argument("--tol", type=float, help="solver tolerance")
    p.add_argument("--k", type=int, help="eigenvalue count")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lvsync", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("theta", "solve the logistic steady state"),
        ("steady", "build the synchronized steady state"),
        ("spectrum", "eigenpairs of the weighted operator for the given a-field"),
        ("verify", "verify linear stability via spectral equivalence"),
        ("evolve", "integrate a perturbed state and fit the decay rate"),
        ("sweep", "verify over a Cartesian parameter grid"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name == "spectrum":
            p.add_argument("--functions", action="store_true", default=None,
                           help="also write one field file per eigenfunction")
        if name == "evolve":
            p.add_argument("--dt", type=float, help="time step")
            p.add_argument("--t-end", dest="t_end", type=float, help="final time")
            p.add_argument("--amplitude", type=float, help="perturbation amplitude")
            p.add_argument("--store-every", dest="store_every", type=int,
                           help="store every k-th step")
            p.add_argument("--snapshots", help="comma list of snapshot times")
        if name == "sweep":
            p.add_argument("--sweep-a", help="axis values: comma list or start:stop:step")
            p.add_argument("--sweep-b", help="axis values: comma list or start:stop:step")
            p.add_argument("--sweep-c", help="axis values: comma list or start:stop:step")
            p.add_argument("--sweep-n", dest="sweep_resolution",
                           help="resolution axis: comma list or start:stop:step")
    return parser


def _collect_overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.domain is not None:
        overrides["kind"], overrides["extents"] = parse_domain(args.domain)
    if args.n is not None:
        overrides["resolution"] = parse_resolution(args.n)
    for name in ("a", "a0", "a1", "b", "c", "tol", "k", "seed", "out", "format", "workers"):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    for name in ("dt", "t_end", "amplitude", "store_every", "functions"):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    snapshots = getattr(args, "snapshots", None)
    if snapshots is not None:
        overrides["snapshot_times"] = tuple(parse_value_list(snapshots))
    return overrides


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg: dict = {}
        if args.config:
            path = Path(args.config)
            if not path.exists():
                raise ConfigError(f"config file not found: {path}")
            with open(path) as fh:
                file_cfg = json.load(fh)
        cfg = _merge_config(file_cfg, _collect_overrides(args))
        validate_config(cfg, args.command)
        if args.command == "theta":
            return cmd_theta(cfg)
        if args.command == "steady":
            return cmd_steady(cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "evolve":
            return cmd_evolve(cfg)
        if args.command == "sweep":
            axes = _sweep_axes(file_cfg, args)
            return cmd_sweep(cfg, axes)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
