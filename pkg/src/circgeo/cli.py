"""Command-line front end: eval / verify / scan with JSON or CSV reports.

Exit codes: 0 all checks passed, 1 at least one failure, 2 configuration or
I/O error.  Reports are deterministic for a fixed config and seed (stable
key order, records sorted by point index then check name, no timestamps).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .circulant import IDENTITY, circ_mul
from .connection import (
    christoffel_closed,
    christoffel_general,
    metric_compatibility_residual,
    nabla_q,
    parallel_defect,
)
from .circulant import Q_DENSE
from .curvature import (
    circ_apply_q2,
    curvature_at,
    independence_cubic,
    residual_scale,
    sectional_curvature,
    theorem3_check,
)
from .errors import (
    CircGeoError,
    ConfigError,
    DegenerateMetric,
    DependentOrbit,
    IndefiniteMetric,
    ParseError,
    UnknownBuiltin,
)
from .fields import FieldPair, Polynomial, domain_check, field_eval, metric_at, parse_field_spec

DEFAULT_TOLERANCES = {
    "dual_path": 1e-9,
    "dual_path_fd": 1e-5,
    "defect_zero": 1e-9,
    "nabla_q": 1e-10,
    "nabla_q_nonzero": 1e-6,
    "metric_inverse": 1e-12,
    "metric_compat": 1e-9,
    "flat_gamma": 1e-14,
    "flat_curvature": 1e-10,
    "identity_rel": 1e-7,
    "spread_rel": 1e-6,
    "spread_abs": 1e-9,
}


@dataclass
class RunConfig:
    """Everything a command run depends on, echoed verbatim into the report."""

    fields: str = "paper-example"
    points: list | None = None
    grid: list | None = None  # [min, max, steps] or three such triples
    grad_mode: str = "analytic"
    fd_step: float = 1e-6
    seed: int = 0
    x: list = field(default_factory=lambda: [1.0, 2.0, 3.0])
    n_points: int = 10
    n_vectors: int = 20
    n_seeds: int = 20
    out: str | None = None
    fmt: str = "json"
    tolerances: dict = field(default_factory=dict)

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def echo(self) -> dict:
        return {
            "fields": self.fields,
            "points": self.points,
            "grid": self.grid,
            "grad_mode": self.grad_mode,
            "fd_step": self.fd_step,
            "seed": self.seed,
            "x": list(self.x),
            "n_points": self.n_points,
            "n_vectors": self.n_vectors,
            "n_seeds": self.n_seeds,
            "format": self.fmt,
            "tolerances": {k: self.tol(k) for k in sorted(DEFAULT_TOLERANCES)},
        }


def expand_grid(grid: list) -> list[list[float]]:
    """Expand [min, max, steps] (or per-axis triples) into grid nodes."""
    if len(grid) == 3 and not isinstance(grid[0], (list, tuple)):
        axes = [grid, grid, grid]
    elif len(grid) == 9:
        axes = [grid[0:3], grid[3:6], grid[6:9]]
    elif len(grid) == 3:
        axes = list(grid)
    else:
        raise ConfigError("grid must be min,max,steps or three such triples")
    axis_values = []
    for lo, hi, steps in axes:
        steps = int(steps)
        if steps <= 0:
            raise ConfigError("grid steps must be positive")
        axis_values.append(np.linspace(float(lo), float(hi), steps))
    return [
        [float(v1), float(v2), float(v3)]
        for v1 in axis_values[0]
        for v2 in axis_values[1]
        for v3 in axis_values[2]
    ]


def resolve_points(config: RunConfig, f: FieldPair, rng: np.random.Generator) -> list[list[float]]:
    if config.points:
        return [[float(c) for c in p] for p in config.points]
    if config.grid:
        return expand_grid(config.grid)
    try:
        return [
            [float(c) for c in sampling.random_point(rng, f)] for _ in range(config.n_points)
        ]
    except RuntimeError as exc:
        raise ConfigError(f"could not sample admissible points: {exc}") from exc


def _record(check: str, index: int, point, status: str, **extra) -> dict:
    rec = {"check": check, "point_index": index, "point": [float(c) for c in point], "status": status}
    rec.update(extra)
    return rec


def _is_constant(f: FieldPair) -> bool:
    return (
        isinstance(f.a, Polynomial)
        and isinstance(f.b, Polynomial)
        and f.a.degree() == 0
        and f.b.degree() == 0
    )


def cmd_eval(config: RunConfig, what: str) -> dict:
    f = _build_fields(config)
    rng = np.random.default_rng(config.seed)
    points = resolve_points(config, f, rng)
    records = []
    for idx, p in enumerate(points):
        try:
            records.append(_eval_one(config, f, what, idx, p))
        except (DegenerateMetric, DependentOrbit, IndefiniteMetric) as exc:
            records.append(
                _record(what, idx, p, "skipped", reason=type(exc).__name__, detail=str(exc))
            )
    return _assemble(config, records)


def _eval_one(config: RunConfig, f: FieldPair, what: str, idx: int, p) -> dict:
    if what == "metric":
        status = domain_check(f, p)
        if status.degenerate:
            return _record(what, idx, p, "skipped", reason="DegenerateMetric", d=status.d)
        m = metric_at(f, p)
        return _record(
            what,
            idx,
            p,
            "pass",
            g=list(m.g.triple()),
            g_inv=list(m.g_inv.triple()),
            d=m.d,
            definite=m.definite,
        )
    if what == "christoffel":
        gamma = christoffel_general(f, p)
        return _record(what, idx, p, "pass", gamma=gamma.gamma.tolist())
    if what == "nabla-q":
        nq = nabla_q(f, p)
        return _record(what, idx, p, "pass", max_norm=nq.max_norm, components=nq.components.tolist())
    if what == "curvature":
        curv = curvature_at(f, p, config.fd_step)
        return _record(what, idx, p, "pass", max_abs=curv.max_abs, r_down=curv.r_down.tolist())
    if what == "sectional":
        report = theorem3_check(
            f, p, config.x, config.fd_step, config.tol("spread_rel"), config.tol("spread_abs")
        )
        return _record(
            what,
            idx,
            p,
            "pass" if report.passed else "fail",
            mu=list(report.mu),
            spread=report.spread,
            independence=report.independence,
        )
    raise ConfigError(f"unknown eval target {what!r}")


def cmd_verify(config: RunConfig) -> dict:
    f = _build_fields(config)
    rng = np.random.default_rng(config.seed)
    points = resolve_points(config, f, rng)
    dual_tol = config.tol("dual_path" if config.grad_mode == "analytic" else "dual_path_fd")
    records = []
    for idx, p in enumerate(points):
        status = domain_check(f, p)
        if status.degenerate:
            records.append(_record("all", idx, p, "skipped", reason="DegenerateMetric", d=status.d))
            continue
        records.extend(_verify_point(config, f, rng, idx, p, status, dual_tol))
    records.sort(key=lambda r: (r["point_index"], r["check"]))
    return _assemble(config, records)


def _verify_point(config, f, rng, idx, p, status, dual_tol) -> list[dict]:
    records = []

    m = metric_at(f, p)
    prod = circ_mul(m.g, m.g_inv)
    resid = max(
        abs(prod.a - IDENTITY.a), abs(prod.b - IDENTITY.b), abs(prod.c - IDENTITY.c)
    )
    tol = config.tol("metric_inverse")
    records.append(
        _record("metric-inverse", idx, p, "pass" if resid <= tol else "fail",
                residual=resid, tolerance=tol)
    )

    general = christoffel_general(f, p)
    closed = christoffel_closed(f, p)
    resid = float(np.max(np.abs(general.gamma - closed.gamma)))
    records.append(
        _record("christoffel-dual-path", idx, p, "pass" if resid <= dual_tol else "fail",
                residual=resid, tolerance=dual_tol)
    )

    resid = metric_compatibility_residual(f, p)
    tol = config.tol("metric_compat")
    records.append(
        _record("metric-compatibility", idx, p, "pass" if resid <= tol else "fail",
                residual=resid, tolerance=tol)
    )

    defect = float(np.max(np.abs(parallel_defect(f, p))))
    nq = nabla_q(f, p, general).max_norm
    if defect <= config.tol("defect_zero"):
        tol = config.tol("nabla_q")
        records.append(
            _record("theorem1-parallel", idx, p, "pass" if nq <= tol else "fail",
                    defect=defect, nabla_q=nq, tolerance=tol)
        )
        records.extend(_verify_curvature(config, f, rng, idx, p, status))
    elif defect >= 0.1:
        tol = config.tol("nabla_q_nonzero")
        records.append(
            _record("theorem1-converse", idx, p, "pass" if nq > tol else "fail",
                    defect=defect, nabla_q=nq, tolerance=tol)
        )
    else:
        records.append(
            _record("theorem1-parallel", idx, p, "skipped",
                    reason="defect neither zero nor large", defect=defect, nabla_q=nq)
        )

    if _is_constant(f):
        gamma_max = general.max_abs
        curv_max = curvature_at(f, p, config.fd_step).max_abs
        g_tol = config.tol("flat_gamma")
        c_tol = config.tol("flat_curvature")
        ok = gamma_max <= g_tol and curv_max <= c_tol
        records.append(
            _record("flat-baseline", idx, p, "pass" if ok else "fail",
                    gamma_max=gamma_max, curvature_max=curv_max,
                    tolerance=min(g_tol, c_tol))
        )
    return records


def _verify_curvature(config, f, rng, idx, p, status) -> list[dict]:
    records = []
    curv = curvature_at(f, p, config.fd_step)
    rel = config.tol("identity_rel")

    worst31 = worst36 = 0.0
    q2 = Q_DENSE @ Q_DENSE
    eq32_lhs = np.einsum("skja,ia->skji", curv.r_up, Q_DENSE)
    eq32_rhs = np.einsum("akji,as->skji", curv.r_up, Q_DENSE)
    resid32 = float(np.max(np.abs(eq32_lhs - eq32_rhs)))
    scale32 = max(curv.max_abs, float(np.max(np.abs(curv.r_up))), 1e-300)
    records.append(
        _record("identity-3.2", idx, p, "pass" if resid32 <= rel * scale32 else "fail",
                residual=resid32, tolerance=rel * scale32)
    )

    for _ in range(config.n_vectors):
        x, y, z, u = (sampling.random_vector(rng) for _ in range(4))
        scale = max(residual_scale(curv, x, y, z, u), 1e-300)
        r31 = abs(curv.scalar(x, y, q2 @ z, u) - curv.scalar(x, y, z, Q_DENSE @ u))
        r36a = abs(curv.scalar(x, y, z, u) - curv.scalar(x, y, Q_DENSE @ z, Q_DENSE @ u))
        r36b = abs(curv.scalar(x, y, z, u) - curv.scalar(x, y, q2 @ z, circ_apply_q2(u)))
        worst31 = max(worst31, r31 / scale)
        worst36 = max(worst36, max(r36a, r36b) / scale)
    records.append(
        _record("identity-3.1", idx, p, "pass" if worst31 <= rel else "fail",
                residual=worst31, tolerance=rel)
    )
    records.append(
        _record("identity-3.6", idx, p, "pass" if worst36 <= rel else "fail",
                residual=worst36, tolerance=rel)
    )

    if status.definite:
        worst_spread = 0.0
        ok = True
        n_done = 0
        tries = 0
        while n_done < config.n_seeds and tries < 100 * config.n_seeds:
            tries += 1
            x = sampling.random_vector(rng)
            if abs(independence_cubic(x)) <= 0.1 * float(np.linalg.norm(x)) ** 3:
                continue
            report = theorem3_check(
                f, p, x, config.fd_step, config.tol("spread_rel"), config.tol("spread_abs")
            )
            worst_spread = max(worst_spread, report.spread)
            ok = ok and report.passed
            n_done += 1
        records.append(
            _record("theorem3-spread", idx, p, "pass" if ok else "fail",
                    worst_spread=worst_spread, seeds=n_done)
        )
    else:
        records.append(
            _record("theorem3-spread", idx, p, "skipped", reason="IndefiniteMetric")
        )
    return records


def cmd_scan(config: RunConfig) -> dict:
    if not config.grid:
        raise ConfigError("scan requires a grid spec")
    f = _build_fields(config)
    points = expand_grid(config.grid)
    records = []
    for idx, p in enumerate(points):
        a, b = field_eval(f, p)
        status = domain_check(f, p)
        row = _record(
            "scan", idx, p,
            "skipped" if status.degenerate else "pass",
            a=a, b=b, d=status.d, definite=status.definite,
        )
        if status.degenerate:
            row["reason"] = "DegenerateMetric"
        mu = None
        if not status.degenerate and status.definite:
            try:
                x = np.asarray(config.x, dtype=float)
                qx = Q_DENSE @ x
                curv = curvature_at(f, p, config.fd_step)
                mu = sectional_curvature(f, p, x, qx, curv=curv)
            except CircGeoError:
                mu = None
        row["mu_e1"] = mu
        records.append(row)
    return _assemble(config, records)


def _build_fields(config: RunConfig) -> FieldPair:
    try:
        return parse_field_spec(
            config.fields,
            grad_mode=config.grad_mode,
            fd_step=config.fd_step if config.grad_mode == "fd" else 1e-6,
        )
    except (ParseError, UnknownBuiltin) as exc:
        raise ConfigError(f"bad field spec: {exc}") from exc


def _assemble(config: RunConfig, records: list[dict]) -> dict:
    summary = {
        "pass_count": sum(1 for r in records if r["status"] == "pass"),
        "fail_count": sum(1 for r in records if r["status"] == "fail"),
        "skipped_count": sum(1 for r in records if r["status"] == "skipped"),
        "total": len(records),
    }
    return {"config": config.echo(), "records": records, "summary": summary}


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def render_csv(report: dict) -> str:
    records = report["records"]
    keys = sorted({k for r in records for k in r})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for r in records:
        writer.writerow([_csv_cell(r.get(k)) for k in keys])
    return buf.getvalue()


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return ";".join(repr(float(v)) for v in value)
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circgeo",
        description="Construct the circulant-metric 3-manifold, compute its "
        "connection and curvature, and verify its structural identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("eval", "verify", "scan"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file mirroring the run configuration")
        sp.add_argument("--fields", help="field spec text, @file, or builtin name")
        sp.add_argument("--point", action="append", help="x,y,z (repeatable)")
        sp.add_argument("--grid", help="min,max,steps (3 or 9 comma-separated values)")
        sp.add_argument("--grad", choices=("analytic", "fd"))
        sp.add_argument("--step", type=float, help="finite-difference step")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--x", help="seed tangent vector x,y,z for sectional checks")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--tol", action="append", default=[], help="KEY=VALUE override")
        if name == "eval":
            sp.add_argument(
                "what",
                choices=("metric", "christoffel", "nabla-q", "curvature", "sectional"),
            )
    return parser


def _parse_triple(text: str, what: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"{what} must be three comma-separated numbers, got {text!r}")
    try:
        return [float(v) for v in parts]
    except ValueError as exc:
        raise ConfigError(f"bad {what}: {text!r}") from exc


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        _apply_config_dict(config, data)
    if args.fields:
        text = args.fields
        if text.startswith("@"):
            try:
                with open(text[1:], encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read fields file: {exc}") from exc
        config.fields = text
    if args.point:
        config.points = [_parse_triple(p, "--point") for p in args.point]
        config.grid = None
    if args.grid:
        parts = args.grid.split(",")
        try:
            config.grid = [float(v) for v in parts]
        except ValueError as exc:
            raise ConfigError(f"bad grid spec {args.grid!r}") from exc
        config.points = None
    if args.grad:
        config.grad_mode = args.grad
    if args.step is not None:
        if args.step <= 0:
            raise ConfigError("step must be positive")
        config.fd_step = args.step
    if args.seed is not None:
        config.seed = args.seed
    if args.x:
        config.x = _parse_triple(args.x, "--x")
    if args.out:
        config.out = args.out
    if args.format:
        config.fmt = args.format
    for item in args.tol:
        key, eq, value = item.partition("=")
        if not eq or key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"bad tolerance override {item!r}")
        try:
            parsed = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance value {value!r}") from exc
        if parsed <= 0:
            raise ConfigError(f"tolerance {key} must be positive")
        config.tolerances[key] = parsed
    return config


_CONFIG_KEYS = {
    "fields": "fields",
    "points": "points",
    "grid": "grid",
    "grad_mode": "grad_mode",
    "fd_step": "fd_step",
    "seed": "seed",
    "x": "x",
    "n_points": "n_points",
    "n_vectors": "n_vectors",
    "n_seeds": "n_seeds",
    "out": "out",
    "format": "fmt",
    "tolerances": "tolerances",
}


def _apply_config_dict(config: RunConfig, data: dict) -> None:
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a JSON object")
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(config, _CONFIG_KEYS[key], value)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        if args.command == "eval":
            report = cmd_eval(config, args.what)
        elif args.command == "verify":
            report = cmd_verify(config)
        else:
            report = cmd_scan(config)
        text = render_csv(report) if config.fmt == "csv" else render_json(report)
        if config.out:
            try:
                with open(config.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            except OSError as exc:
                raise ConfigError(f"cannot write output: {exc}") from exc
        else:
            sys.stdout.write(text)
    except ConfigError as exc:
        print(f"circgeo: error: {exc}", file=sys.stderr)
        return 2
    return 0 if report["summary"]["fail_count"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
