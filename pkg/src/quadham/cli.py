"""
Command-line interface.

Exit codes: 0 success, 1 failed verification, 2 bad model or input
(including non-symmetric Hamiltonians and parse errors), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import CATALOG, build, get_model
from .checks import FAIL, run_checks
from .dynamics import estimate_frequencies, evolution_matrix, growth_rate, integrate
from .errors import NumericalFailure, QuadHamError
from .export import (
    boundary_decimals,
    sweep_svg,
    unique_frequencies,
    write_sweep_csv,
    write_trajectory_csv,
)
from .report import SCHEMA, analyze, cpair, dumps, load_matrix_file, load_model_file
from .spectra import BROKEN, REAL, classify, eigen
from .sweep import SweepAxis, find_boundary, sweep
from .tolerances import Tolerances

log = logging.getLogger("quadham")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _parse_set(items):
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise CliError(f"--set expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(val)
        except ValueError:
            raise CliError(f"--set {name}: {val!r} is not a number") from None
    return out


def _resolve_model(args):
    if getattr(args, "file", None):
        if args.model:
            raise CliError("give either --model or --file, not both")
        return load_model_file(args.file)
    if not args.model:
        raise CliError("a model is required (--model ID or --file PATH)")
    return get_model(args.model)


def _tolerances(args) -> Tolerances:
    tol = Tolerances.from_env()
    for name in ("reality", "ep", "pairing", "structural", "oracle", "orthogonality", "residual"):
        v = getattr(args, f"tol_{name}", None)
        if v is not None:
            tol = tol.override(f"{name}={v}")
    return tol


def _add_model_args(p, file_ok=True):
    p.add_argument("--model", help=f"catalog model: {', '.join(CATALOG)}")
    if file_ok:
        p.add_argument("--file", help="model JSON file with name, K, hamiltonian, parameters")
    p.add_argument("--set", action="append", metavar="NAME=VALUE", help="override a parameter (repeatable)")


def _add_tol_args(p):
    p.add_argument("--tol-reality", type=float, help="reality tolerance on Im(lambda)")
    p.add_argument("--tol-ep", type=float, help="pseudo-norm threshold for exceptional points")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- commands ---------------------------------------------------------------------


def cmd_analyze(args) -> int:
    spec = _resolve_model(args)
    inst = build(spec, _parse_set(args.set))
    rep = analyze(inst, _tolerances(args))
    _write(args.out, rep.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    tol = _tolerances(args)
    if args.matrix:
        if args.model or args.file:
            raise CliError("--matrix cannot be combined with a model")
        H = load_matrix_file(args.matrix)
        h = None
        title = args.matrix
    else:
        spec = _resolve_model(args)
        inst = build(spec, _parse_set(args.set))
        H, h = inst.adjoint, inst.poly
        title = spec.id
    spec_ = eigen(H, tol.residual)
    phase = classify(spec_, tol.reality, tol.ep)
    results = run_checks(H, h, tol, spectrum=spec_)
    print(f"# {title}: phase {phase.label}")
    print(f"{'check':<22} {'status':<6} {'value':>12} {'tol':>9}  detail")
    for r in results:
        val = "-" if r.value is None else f"{r.value:.3e}"
        t = "-" if r.tol is None else f"{r.tol:.1e}"
        print(f"{r.name:<22} {r.status:<6} {val:>12} {t:>9}  {r.detail}")
    return EXIT_FAILED if any(r.status == FAIL for r in results) else EXIT_OK


def cmd_sweep(args) -> int:
    spec = _resolve_model(args)
    if not args.axis:
        raise CliError("at least one --axis name=lo:hi:n is required")
    if len(args.axis) > 2:
        raise CliError("at most two --axis flags")
    try:
        axes = [SweepAxis.parse(a) for a in args.axis]
    except ValueError as exc:
        raise CliError(str(exc)) from None
    tol = _tolerances(args)
    grid = sweep(spec, _parse_set(args.set), axes, jobs=args.jobs, reality_tol=tol.reality, ep_tol=tol.ep)
    if args.out in (None, "-"):
        write_sweep_csv(grid, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_sweep_csv(grid, fh)
    if args.svg:
        Path(args.svg).write_text(sweep_svg(grid, title=f"{spec.id} phase diagram"))
    return EXIT_OK


def cmd_boundary(args) -> int:
    spec = _resolve_model(args)
    try:
        lo, hi = (float(v) for v in args.bracket.split(":"))
    except ValueError:
        raise CliError(f"--bracket expects lo:hi, got {args.bracket!r}") from None
    tol = _tolerances(args)
    res = find_boundary(spec, _parse_set(args.set), args.param, (lo, hi), args.tol, tol.reality, tol.ep)
    if args.json:
        print(
            dumps(
                {
                    "schema": SCHEMA,
                    "model": spec.id,
                    "param": res.param,
                    "critical_value": res.critical_value,
                    "bracket_width_final": res.bracket_width_final,
                    "phase_lo": res.phase_lo,
                    "phase_hi": res.phase_hi,
                    "steps": res.steps,
                }
            )
        )
    else:
        print(f"{res.critical_value:.{boundary_decimals(args.tol)}f}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = _resolve_model(args)
    inst = build(spec, _parse_set(args.set))
    tol = _tolerances(args)
    s = eigen(inst.adjoint, tol.residual)
    phase = classify(s, tol.reality, tol.ep).label
    M = evolution_matrix(inst.adjoint)
    z0 = None
    if args.z0:
        z0 = [float(v) for v in args.z0.split(",")]
        if len(z0) != 2 * spec.K:
            raise CliError(f"--z0 needs {2 * spec.K} comma-separated values")
    try:
        tr = integrate(M, z0, args.T, args.dt)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_trajectory_csv(tr, fh)
    summary = {
        "schema": SCHEMA,
        "model": spec.id,
        "parameters": dict(inst.params),
        "phase": phase,
        "eigenvalues": [cpair(v) for v in s.values],
        "samples": len(tr.times),
        "overflow": tr.overflow,
    }
    if phase == REAL:
        summary["frequencies"] = [float(f) for f in estimate_frequencies(tr)]
        summary["expected_frequencies"] = unique_frequencies(s.values, tol.reality)
    elif phase == BROKEN:
        try:
            summary["growth_rate"] = growth_rate(tr)
        except QuadHamError as exc:
            summary["growth_rate"] = None
            log.warning("growth rate unavailable: %s", exc)
        summary["expected_growth_rate"] = float(np.max(np.abs(s.values.imag)))
    print(dumps(summary))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quadham",
        description="Adjoint-matrix spectra and phase structure of symmetric quadratic Hamiltonians.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full spectral report as JSON")
    _add_model_args(p)
    _add_tol_args(p)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="pass/fail table of structural identities")
    _add_model_args(p)
    p.add_argument("--matrix", help="adjoint-matrix JSON file (or an analysis report) to check instead of a model")
    _add_tol_args(p)
    p.add_argument("--tol-pairing", type=float)
    p.add_argument("--tol-structural", type=float, help="pseudo-Hermiticity tolerance")
    p.add_argument("--tol-oracle", type=float, help="formula vs commutator tolerance")
    p.add_argument("--tol-orthogonality", type=float)
    p.add_argument("--tol-residual", type=float, help="ladder / constant-of-motion tolerance")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="phase map over one or two parameters (CSV)")
    _add_model_args(p)
    _add_tol_args(p)
    p.add_argument("--axis", action="append", metavar="NAME=LO:HI:N", help="sweep axis (give twice for 2D)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--svg", help="also render the phase map as SVG")
    p.add_argument("--jobs", type=int, default=1, help="worker processes; output order is unaffected")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="bisect for a Real/non-Real transition")
    _add_model_args(p)
    _add_tol_args(p)
    p.add_argument("--param", required=True)
    p.add_argument("--bracket", required=True, metavar="LO:HI")
    p.add_argument("--tol", type=float, default=1e-6, help="final bracket width")
    p.add_argument("--json", action="store_true", help="print the full result as JSON")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("simulate", help="integrate the equations of motion")
    _add_model_args(p)
    _add_tol_args(p)
    p.add_argument("--T", type=float, default=200.0, help="time horizon")
    p.add_argument("--dt", type=float, default=0.01, help="RK4 step")
    p.add_argument("--z0", help="initial state, comma-separated (x..., p...)")
    p.add_argument("--out", help="trajectory CSV path")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except CliError as exc:
        print(f"quadham: error: {exc}", file=sys.stderr)
        return exc.code
    except NumericalFailure as exc:
        print(f"quadham: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QuadHamError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"quadham: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
