"""Command-line front end: spectra, eigenfunction grids, verification, oracle.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error,
4 oracle non-convergence.  Diagnostics go to stderr (level set by MQDS_LOG);
data goes to stdout or --out.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .algebra import QGFunction, VarSpace
from .models import (ModelId, dho_f, dho_g, hamiltonian, oscillator_wigner, spectrum,
                     toy_resonant)
from .star import OracleNotConverged, StarConfig, quadrature_star_oracle, star
from .verify import CHECK_REGISTRY, run_all

log = logging.getLogger("mqds")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_ORACLE = 4

_MODEL_NAMES = {
    "oscillator": "harmonic_oscillator",
    "harmonic_oscillator": "harmonic_oscillator",
    "damped_toy": "damped_toy",
    "toy": "damped_toy",
    "damped_ho": "damped_ho",
    "dho": "damped_ho",
}


class UsageError(Exception):
    pass


def _setup_logging() -> None:
    level = os.environ.get("MQDS_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(stream=sys.stderr, level=levels.get(level, logging.WARNING),
                        format="mqds:%(levelname)s: %(message)s")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _model_from_args(args) -> ModelId:
    kind = _MODEL_NAMES.get(args.model)
    if kind is None:
        raise UsageError(f"unknown model '{args.model}'")
    return ModelId(kind, omega=args.omega, gamma=args.gamma)


def _parse_tolerances(spec: str | None) -> Dict[str, float]:
    out: Dict[str, float] = {}
    if not spec:
        return out
    for item in spec.split(","):
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"bad tolerance override '{item}' (expected name=value)")
        name, value = item.split("=", 1)
        if name not in CHECK_REGISTRY:
            raise UsageError(f"unknown check '{name}' in tolerance override")
        out[name] = float(value)
    return out


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        try:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise IOError(str(exc)) from exc
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    model = _model_from_args(args)
    sign = args.sign
    rows: List[Tuple[Tuple[int, ...], complex]] = []
    if model.n_dof == 1:
        for n in range(args.max_n + 1):
            entry = spectrum(model, (n,), sign if model.kind == "damped_toy" else "none")
            rows.append(((n,), args.hbar * entry.eigenvalue))
    else:
        for n in range(args.max_n + 1):
            for m in range(args.max_m + 1):
                entry = spectrum(model, (n, m), sign, family=args.family)
                rows.append(((n, m), args.hbar * entry.eigenvalue))

    meta = {"model": model.kind, "family": args.family, "sign": sign,
            "hbar": args.hbar, "omega": args.omega, "gamma": args.gamma}
    if args.format == "json":
        data = {"metadata": meta,
                "rows": [{"indices": list(idx), "re": ev.real, "im": ev.imag}
                         for idx, ev in rows]}
        _emit(json.dumps(data, indent=2, sort_keys=True) + "\n", args.out)
    else:
        head = "n,re,im" if model.n_dof == 1 else "n,m,re,im"
        lines = [head]
        for idx, ev in rows:
            lines.append(",".join([str(i) for i in idx] + [_fmt(ev.real), _fmt(ev.imag)]))
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# eigenfunction grids
# ---------------------------------------------------------------------------

def _parse_grid(spec: str, space: VarSpace) -> List[Tuple[str, np.ndarray]]:
    """Parse 'x=-3:3:65,p=-3:3:65' into named axes over the space variables."""
    names = space.var_names()
    axes: List[Tuple[str, np.ndarray]] = []
    total = 1
    for part in spec.split(","):
        if not part:
            continue
        if "=" not in part:
            raise UsageError(f"bad grid axis '{part}' (expected name=min:max:points)")
        name, rng = part.split("=", 1)
        if name not in names:
            raise UsageError(f"unknown grid variable '{name}' (have {names})")
        bits = rng.split(":")
        if len(bits) != 3:
            raise UsageError(f"bad grid range '{rng}' (expected min:max:points)")
        lo, hi, pts = float(bits[0]), float(bits[1]), int(bits[2])
        if pts < 2:
            raise UsageError("grid axes need at least 2 points")
        if lo >= hi:
            raise UsageError("grid axis needs min < max")
        axes.append((name, np.linspace(lo, hi, pts)))
        total *= pts
    if not axes:
        raise UsageError("empty grid specification")
    if total > 10**7:
        raise UsageError("grid exceeds 10^7 points")
    return axes


def _builtin_function(model: ModelId, family: str, indices: Sequence[int], sign: str,
                      space: VarSpace) -> QGFunction:
    if model.kind == "harmonic_oscillator":
        return oscillator_wigner(indices[0], space)
    if model.kind == "damped_toy":
        return toy_resonant(indices[0], sign, space)
    if family == "G":
        return dho_g(indices[0], indices[1], space)
    return dho_f(indices[0], indices[1], sign, space)


def cmd_eigenfunction(args) -> int:
    model = _model_from_args(args)
    space = VarSpace(model.n_dof, args.hbar)
    indices = (args.n,) if model.n_dof == 1 else (args.n, args.m)
    f = _builtin_function(model, args.family, indices, args.sign, space)
    axes = _parse_grid(args.grid, space)

    names = space.var_names()
    axis_by_name = dict(axes)
    grids = [axis_by_name.get(nm, np.array([0.0])) for nm in names]
    mesh = np.meshgrid(*grids, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    values = f.evaluate_grid(pts)

    meta = {"model": model.kind, "family": args.family, "indices": list(indices),
            "sign": args.sign, "hbar": args.hbar,
            "parameters": {"omega": args.omega, "gamma": args.gamma}}
    if args.format == "json":
        data = {
            "spec": {nm: {"min": float(a[0]), "max": float(a[-1]), "points": len(a)}
                     for nm, a in axes},
            "metadata": meta,
            "values": [[v.real, v.imag] for v in values],
        }
        _emit(json.dumps(data, indent=2, sort_keys=True) + "\n", args.out)
    else:
        header = ",".join(names) + ",re,im"
        lines = [header]
        for row, v in zip(pts, values):
            lines.append(",".join([_fmt(c.real) for c in row] + [_fmt(v.real), _fmt(v.imag)]))
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    selectors = None
    if args.suite != "all":
        selectors = [s for s in args.suite.split(",") if s]
        for s in selectors:
            if s not in CHECK_REGISTRY:
                raise UsageError(f"unknown check '{s}' (registry: {', '.join(CHECK_REGISTRY)})")
    overrides = _parse_tolerances(args.tolerance)
    log.info("running checks: %s", selectors or "all")
    report = run_all(selectors=selectors, seed=args.seed, tolerance_overrides=overrides,
                     hbar=args.hbar, omega=args.omega, gamma=args.gamma)
    _emit(report.to_json() + "\n", args.out)
    for e in report.failed_entries():
        log.error("failed: %s %s residual=%.3g tol=%.3g",
                  e.name, e.params, e.residual, e.tolerance)
    return EXIT_OK if report.all_passed else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def _named_function(name: str, space: VarSpace, args) -> QGFunction:
    n = space.n_dof
    builtins_1d = {
        "x": lambda: QGFunction.coordinate(space, 0),
        "p": lambda: QGFunction.coordinate(space, 1),
        "H_ho": lambda: hamiltonian(ModelId.oscillator(args.omega), space),
        "H_d": lambda: hamiltonian(ModelId.toy(args.gamma), space),
    }
    if name.startswith("@"):
        try:
            with open(name[1:], "r", encoding="utf-8") as fh:
                return QGFunction.from_json_dict(json.load(fh))
        except OSError as exc:
            raise IOError(str(exc)) from exc
    if n == 1 and name in builtins_1d:
        return builtins_1d[name]()
    if name.startswith("W") and n == 1:
        return oscillator_wigner(int(name[1:]), space)
    if name.startswith("F") and name.endswith(("+", "-")) and n == 1:
        return toy_resonant(int(name[1:-1]), name[-1], space)
    if name == "G00" and n == 2:
        return dho_g(0, 0, space)
    if name == "F00+" and n == 2:
        return dho_f(0, 0, "+", space)
    raise UsageError(f"unknown oracle function '{name}' for N={n}")


def cmd_oracle(args) -> int:
    n_dof = 2 if args.ndof == 2 else 1
    space = VarSpace(n_dof, args.hbar)
    f = _named_function(args.f, space, args)
    g = _named_function(args.g, space, args)
    pts: List[np.ndarray] = []
    for chunk in args.points.split(";"):
        if not chunk:
            continue
        vals = [float(v) for v in chunk.split(",")]
        if len(vals) != space.dim:
            raise UsageError(f"oracle point needs {space.dim} coordinates")
        pts.append(np.array(vals))
    if not pts:
        raise UsageError("no oracle points given")
    cfg = StarConfig(oracle_grid_halfwidth=args.halfwidth,
                     oracle_points_per_axis=args.points_per_axis)
    closed_fn = star(f, g)
    lines = ["point,closed_re,closed_im,quadrature_re,quadrature_im,rel_error"]
    for z in pts:
        closed = closed_fn.evaluate(z)
        quad = quadrature_star_oracle(f, g, z, cfg)
        rel = abs(closed - quad) / max(abs(closed), abs(quad), 1e-12)
        lines.append(",".join(["/".join(_fmt(v) for v in z),
                               _fmt(closed.real), _fmt(closed.imag),
                               _fmt(quad.real), _fmt(quad.imag), f"{rel:.3e}"]))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mqds",
        description="Moyal star-product engine for quantized damped systems")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--omega", type=float, default=1.0)
    common.add_argument("--gamma", type=float, default=1.0)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="write data here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", default=None,
                        help="comma-separated name=value tolerance overrides")

    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="emit eigenvalue tables")
    sp.add_argument("--model", required=True)
    sp.add_argument("--family", choices=("W", "F", "G"), default="F")
    sp.add_argument("--max-n", type=int, default=4)
    sp.add_argument("--max-m", type=int, default=4)
    sp.add_argument("--sign", choices=("+", "-", "none"), default="+")
    sp.set_defaults(fn=cmd_spectrum)

    ef = sub.add_parser("eigenfunction", parents=[common],
                        help="evaluate a family member on a grid")
    ef.add_argument("--model", required=True)
    ef.add_argument("--family", choices=("W", "F", "G"), default="W")
    ef.add_argument("--n", type=int, default=0)
    ef.add_argument("--m", type=int, default=0)
    ef.add_argument("--sign", choices=("+", "-"), default="+")
    ef.add_argument("--grid", required=True,
                    help="axis spec like x=-3:3:65,p=-3:3:65 (unlisted variables pinned at 0)")
    ef.set_defaults(fn=cmd_eigenfunction)

    vf = sub.add_parser("verify", parents=[common], help="run the verification registry")
    vf.add_argument("--suite", default="all",
                    help="'all' or comma-separated registry names")
    vf.set_defaults(fn=cmd_verify)

    orc = sub.add_parser("oracle", parents=[common],
                         help="closed-form star vs quadrature comparison table")
    orc.add_argument("--f", required=True, help="built-in name (x, p, W0, F0+, ...) or @file.json")
    orc.add_argument("--g", required=True)
    orc.add_argument("--points", required=True, help="semicolon-separated points, e.g. '1,1;0,0.5'")
    orc.add_argument("--ndof", type=int, choices=(1, 2), default=1)
    orc.add_argument("--halfwidth", type=float, default=8.0)
    orc.add_argument("--points-per-axis", type=int, default=48)
    orc.set_defaults(fn=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OracleNotConverged as exc:
        log.error("oracle did not converge: %s", exc)
        return EXIT_ORACLE
    except IOError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
