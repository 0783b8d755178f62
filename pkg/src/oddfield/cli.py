"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 invalid configuration,
3 numerical failure, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DimensionError, LightconeDegeneracyError, NoRetardedRootError, OddFieldError, QuadratureError, WorldlineError
from .fields import F_uniform, FieldTensor, default_step, field_and_divergence, measure_field_prefactor, residuals
from .gauge import gauge_gap
from .greens import QuadratureSpec, coefficient_C, fp_sinh_integral
from .potentials import A_ashift_oracle, A_generic, A_uniform
from .spacetime import Dimension, boost, dot, velocity_from_beta
from .worldline import HyperbolicWorldline, UniformWorldline, Worldline

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4
SKIPPED = "skipped"
SUITE_CHOICES = ("geometry", "worldline", "greens", "potentials", "fields", "gauge", "all")


class ConfigError(OddFieldError):
    pass


@dataclass
class GridAxis:
    axis: int
    lo: float
    hi: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count) if self.count > 1 else np.array([self.lo])


@dataclass
class RunConfig:
    dim: Dimension
    worldline: Worldline
    charge: float = 1.0
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    out: str | None = None
    fmt: str = "json"
    grid: list[GridAxis] = field(default_factory=list)
    t: float = 0.0
    x: np.ndarray | None = None


# -- parsing ------------------------------------------------------------------

def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def parse_grid(spec: str, D: int) -> GridAxis:
    """``axis=lo:hi:count`` with axis an index 0..D-1 (or t, x1, x2, ...)."""
    try:
        name, rng = spec.split("=", 1)
        lo, hi, count = rng.split(":")
        name = name.strip()
        axis = 0 if name == "t" else int(name[1:] if name.startswith("x") else name)
        g = GridAxis(axis, float(lo), float(hi), int(count))
    except ValueError as exc:
        raise ConfigError(f"bad --grid value {spec!r}; expected axis=lo:hi:count") from exc
    if not 0 <= g.axis < D:
        raise ConfigError(f"grid axis {g.axis} outside 0..{D - 1}")
    if g.count < 1:
        raise ConfigError("grid counts must be >= 1")
    if not (math.isfinite(g.lo) and math.isfinite(g.hi)):
        raise ConfigError("grid bounds must be finite")
    return g


def build_worldline(args, D: int) -> Worldline:
    if args.worldline == "uniform":
        if args.beta is not None and args.rapidity is not None:
            raise ConfigError("give either --beta or --rapidity, not both")
        if args.rapidity is not None:
            b = np.zeros(D)
            b[0] = 1.0
            return UniformWorldline(boost(b, args.rapidity, args.axis))
        beta = np.zeros(D - 1)
        if args.beta is not None:
            vals = _floats(args.beta)
            if len(vals) > D - 1:
                raise ConfigError(f"--beta has {len(vals)} components; at most {D - 1} allowed")
            beta[: len(vals)] = vals
        return UniformWorldline(velocity_from_beta(beta))
    g = 1.0 if args.g is None else args.g
    if not g > 0:
        raise ConfigError("--g must be positive")
    return HyperbolicWorldline(g, args.axis, D)


def build_config(args) -> RunConfig:
    dim = Dimension(args.dim, args.omega)
    spec = QuadratureSpec(
        lambda_max=args.lambda_max if args.lambda_max is not None else QuadratureSpec.lambda_max,
        rel_tol=args.rel_tol if args.rel_tol is not None else QuadratureSpec.rel_tol,
    )
    x = None
    if getattr(args, "x", None) is not None:
        x = np.array(_floats(args.x))
        if x.size != dim.D:
            raise ConfigError(f"--x needs {dim.D} components, got {x.size}")
    grid = [parse_grid(g, dim.D) for g in (getattr(args, "grid", None) or [])]
    if len({g.axis for g in grid}) != len(grid):
        raise ConfigError("each grid axis may appear once")
    if not math.isfinite(args.charge):
        raise ConfigError("--charge must be finite")
    return RunConfig(dim=dim, worldline=build_worldline(args, dim.D), charge=args.charge, quadrature=spec,
                     out=getattr(args, "out", None), fmt=getattr(args, "format", None) or "json",
                     grid=sorted(grid, key=lambda g: g.axis), t=getattr(args, "t", 0.0) or 0.0, x=x)


# -- output ---------------------------------------------------------------------

def _fmt(v) -> str:
    return repr(float(v))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serializable: {type(o)}")


# -- commands -----------------------------------------------------------------

def cmd_constant(cfg: RunConfig) -> dict:
    dim = cfg.dim
    pref = measure_field_prefactor(dim)
    return {
        "D": dim.D,
        "n": dim.n,
        "omega": dim.omega,
        "fp_sinh_integral": fp_sinh_integral(dim.n),
        "C": coefficient_C(dim),
        "C_uncorrected_sign_chain": coefficient_C(dim, corrected=False),
        "field_prefactor": {
            "confirmed": pref["confirmed"],
            "K": pref["K"],
            "K_over_C_measured": pref["measured_K_over_C"],
            "K_over_C_spread": pref["spread"],
            "candidates": pref["candidates"],
            "distinguishable": pref["distinguishable"],
        },
    }


def cmd_potential(cfg: RunConfig, method: str) -> dict:
    if cfg.x is None:
        raise ConfigError("--x is required")
    w = cfg.worldline
    if method == "closed":
        if not isinstance(w, UniformWorldline):
            raise ConfigError("closed form exists only for the uniform worldline")
        sample = A_uniform(cfg.x, w.b, cfg.dim, cfg.charge)
    elif method == "fp_quadrature":
        sample = A_generic(cfg.x, w, cfg.dim, cfg.charge, cfg.quadrature)
    else:
        sample = A_ashift_oracle(cfg.x, w, cfg.dim, cfg.charge)
    return {"x": sample.x, "A": sample.A, "method": sample.method, "est_error": sample.est_error,
            "worldline": w.to_dict()}


def cmd_gauge(cfg: RunConfig) -> dict:
    if cfg.x is None:
        raise ConfigError("--x is required")
    report = gauge_gap(cfg.x, cfg.worldline, cfg.dim, cfg.charge, cfg.quadrature)
    out = report.to_dict()
    out["worldline"] = cfg.worldline.to_dict()
    return out


def fieldmap_columns(D: int) -> list[str]:
    return ([f"x{m}" for m in range(D)] + [f"A{m}" for m in range(D)]
            + FieldTensor.labels(D) + ["lorenz", "est_error"])


def _grid_points(cfg: RunConfig) -> list[np.ndarray]:
    if not cfg.grid:
        raise ConfigError("fieldmap needs at least one --grid axis=lo:hi:count")
    base = np.zeros(cfg.dim.D)
    base[0] = cfg.t
    pts = []
    for combo in itertools.product(*(g.values() for g in cfg.grid)):
        p = base.copy()
        for g, val in zip(cfg.grid, combo):
            p[g.axis] = val
        pts.append(p)
    return pts


def fieldmap_row(x: np.ndarray, cfg: RunConfig) -> list:
    """One FieldMapRow; points too close to the source or with no retarded image are 'skipped'."""
    dim, w = cfg.dim, cfg.worldline
    D = dim.D
    skipped = [*x.tolist(), *([None] * (D + D * (D - 1) // 2)), SKIPPED, SKIPPED]
    closed = isinstance(w, UniformWorldline)
    h = default_step(x, closed_form=closed)
    try:
        s0 = w.retarded_root(x)
        z, v, _ = w.eval(s0)
        if dot(x - z, v) ** 2 <= (20.0 * h) ** 2:
            return skipped
        if closed:
            A = A_uniform(x, w.b, dim, cfg.charge)
            F = F_uniform(x, w.b, dim, cfg.charge)
            lorenz, _ = residuals(x, lambda y: A_uniform(y, w.b, dim, cfg.charge), dim, h)
        else:
            A = A_generic(x, w, dim, cfg.charge, cfg.quadrature)
            F, lorenz = field_and_divergence(x, lambda y: A_generic(y, w, dim, cfg.charge, cfg.quadrature), dim, h)
    except (LightconeDegeneracyError, NoRetardedRootError):
        return skipped
    return [*x.tolist(), *A.A.tolist(), *F.components.tolist(), lorenz, A.est_error]


def _threads() -> int:
    env = os.environ.get("ODDFIELD_THREADS")
    if env is None:
        return max(1, min(8, os.cpu_count() or 1))
    try:
        k = int(env)
    except ValueError as exc:
        raise ConfigError(f"ODDFIELD_THREADS must be a positive integer, got {env!r}") from exc
    if k < 1:
        raise ConfigError("ODDFIELD_THREADS must be >= 1")
    return k


def cmd_fieldmap(cfg: RunConfig) -> str:
    pts = _grid_points(cfg)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(lambda p: fieldmap_row(p, cfg), pts))
    cols = fieldmap_columns(cfg.dim.D)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(cols)
        for row in rows:
            wr.writerow(["" if v is None else v if isinstance(v, str) else _fmt(v) for v in row])
        return buf.getvalue()
    return _json({"dim": cfg.dim.D, "worldline": cfg.worldline.to_dict(), "columns": cols, "rows": rows})


def cmd_verify(cfg: RunConfig, suite: str) -> dict:
    from . import verify

    return verify.run(suite, cfg.dim)


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=5, help="odd spacetime dimension >= 5")
    common.add_argument("--omega", type=float, default=None, help="Green-function normalization (default: unit sphere area)")
    common.add_argument("--worldline", choices=("uniform", "hyperbolic"), default="uniform")
    common.add_argument("--beta", default=None, help="uniform: spatial velocity, comma-separated")
    common.add_argument("--rapidity", type=float, default=None, help="uniform: rapidity along --axis")
    common.add_argument("--g", type=float, default=None, help="hyperbolic: proper acceleration")
    common.add_argument("--axis", type=int, default=1, help="boost / acceleration axis")
    common.add_argument("--charge", type=float, default=1.0)
    common.add_argument("--lambda-max", dest="lambda_max", type=float, default=None)
    common.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    common.add_argument("--out", default=None, help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="oddfield", description="Retarded potentials and fields in odd dimensions.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("constant", parents=[common], help="finite-part constant, C and the field prefactor")
    pp = sub.add_parser("potential", parents=[common], help="A^mu at one point")
    pp.add_argument("--x", required=True, help="observation point, D comma-separated components")
    pp.add_argument("--method", choices=("closed", "fp_quadrature", "a_shift"), default="fp_quadrature")
    pg = sub.add_parser("gauge", parents=[common], help="gauge gap report at one point")
    pg.add_argument("--x", required=True)
    pf = sub.add_parser("fieldmap", parents=[common], help="A and F on a grid")
    pf.add_argument("--grid", action="append", default=[], help="axis=lo:hi:count (repeatable)")
    pf.add_argument("--t", type=float, default=0.0, help="time coordinate for the grid")
    pf.add_argument("--format", choices=("csv", "json"), default="csv")
    pv = sub.add_parser("verify", parents=[common], help="run invariant suites")
    pv.add_argument("--suite", choices=SUITE_CHOICES, default="all")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = build_config(args)
        if args.command == "constant":
            text = _json(cmd_constant(cfg))
        elif args.command == "potential":
            text = _json(cmd_potential(cfg, args.method))
        elif args.command == "gauge":
            text = _json(cmd_gauge(cfg))
        elif args.command == "fieldmap":
            text = cmd_fieldmap(cfg)
        else:
            report = cmd_verify(cfg, args.suite)
            _emit(_json(report), cfg.out)
            if not report["passed"]:
                print("verification failed: " + "; ".join(report["failed"]), file=sys.stderr)
                return EXIT_VERIFY
            return EXIT_OK
        _emit(text, cfg.out)
    except (ConfigError, ContractError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, WorldlineError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
