"""Phase maps over one or two parameter axes, and bisection for boundaries."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .catalog import ModelSpec, build, get_model
from .errors import InstantiationError, InvalidBracketError, QuadHamError
from .spectra import EP_TOL, REAL, REALITY_TOL, classify, eigen

ERROR = "error"


@dataclass(frozen=True)
class SweepAxis:
    param: str
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"axis {self.param}: need lo < hi, got {self.lo}, {self.hi}")
        if self.n < 2:
            raise ValueError(f"axis {self.param}: need at least 2 samples, got {self.n}")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """``name=lo:hi:n``"""
        try:
            name, rng = text.split("=", 1)
            lo, hi, n = rng.split(":")
            return cls(name.strip(), float(lo), float(hi), int(n))
        except ValueError as exc:
            raise ValueError(f"bad axis {text!r}; expected name=lo:hi:n ({exc})") from None


@dataclass(frozen=True)
class SweepCell:
    values: dict
    max_im: float
    min_pseudo_norm: float
    phase: str
    error: Optional[str] = None


@dataclass(frozen=True)
class SweepGrid:
    model: str
    axes: list
    cells: list = field(default_factory=list)

    @property
    def shape(self) -> tuple:
        return tuple(a.n for a in self.axes)

    def phases(self) -> np.ndarray:
        return np.array([c.phase for c in self.cells], dtype=object).reshape(self.shape)


@dataclass(frozen=True)
class BoundaryResult:
    param: str
    critical_value: float
    bracket_width_final: float
    phase_lo: str
    phase_hi: str
    steps: int


def evaluate(model, params, reality_tol=REALITY_TOL, ep_tol=EP_TOL) -> SweepCell:
    """Instantiate, diagonalize and classify one parameter point.

    Failures are captured in the cell rather than raised.
    """
    try:
        inst = build(model, params)
        lab = classify(eigen(inst.adjoint), reality_tol, ep_tol)
    except QuadHamError as exc:
        return SweepCell(dict(params), math.nan, math.nan, ERROR, f"{type(exc).__name__}: {exc}")
    return SweepCell(dict(params), lab.max_im, lab.min_pseudo_norm, lab.label)


def _evaluate_star(args):
    return evaluate(*args)


def sweep(
    model,
    params: Optional[dict] = None,
    axes: Sequence[SweepAxis] = (),
    jobs: int = 1,
    reality_tol: float = REALITY_TOL,
    ep_tol: float = EP_TOL,
) -> SweepGrid:
    """Classify every point of a row-major grid (last axis fastest)."""
    spec = get_model(model)
    if not 1 <= len(axes) <= 2:
        raise ValueError("a sweep takes one or two axes")
    base = dict(params or {})
    for ax in axes:
        if ax.param not in spec.defaults:
            raise InstantiationError(f"model {spec.id!r} has no parameter {ax.param!r}")
    points = []
    for combo in itertools.product(*(ax.values for ax in axes)):
        q = dict(base)
        q.update({ax.param: float(v) for ax, v in zip(axes, combo)})
        points.append((spec, q, reality_tol, ep_tol))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_evaluate_star, points, chunksize=max(1, len(points) // (4 * jobs))))
    else:
        cells = [evaluate(*pt) for pt in points]
    return SweepGrid(spec.id, list(axes), cells)


def _non_real(model, params, param, value, reality_tol, ep_tol) -> tuple[bool, str]:
    q = dict(params or {})
    q[param] = value
    cell = evaluate(model, q, reality_tol, ep_tol)
    if cell.phase == ERROR:
        raise InstantiationError(f"cannot classify {param}={value}: {cell.error}")
    return cell.phase != REAL, cell.phase


def find_boundary(
    model,
    params: Optional[dict],
    param: str,
    bracket: tuple,
    tol: float = 1e-6,
    reality_tol: float = REALITY_TOL,
    ep_tol: float = EP_TOL,
) -> BoundaryResult:
    """Bisect on the indicator ``phase != Real``; Exceptional counts as non-Real."""
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise InvalidBracketError(f"bracket must satisfy lo < hi, got ({lo}, {hi})")
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec = get_model(model)
    if param not in spec.defaults:
        raise InstantiationError(f"model {spec.id!r} has no parameter {param!r}")
    f_lo, ph_lo = _non_real(spec, params, param, lo, reality_tol, ep_tol)
    f_hi, ph_hi = _non_real(spec, params, param, hi, reality_tol, ep_tol)
    if f_lo == f_hi:
        raise InvalidBracketError(
            f"{param} bracket [{lo}, {hi}] does not straddle a boundary: {ph_lo} at both ends"
            if ph_lo == ph_hi
            else f"{param} bracket [{lo}, {hi}] has no Real/non-Real change ({ph_lo}, {ph_hi})"
        )
    steps = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid, ph_mid = _non_real(spec, params, param, mid, reality_tol, ep_tol)
        if f_mid == f_lo:
            lo, ph_lo = mid, ph_mid
        else:
            hi, ph_hi = mid, ph_mid
        steps += 1
    return BoundaryResult(param, 0.5 * (lo + hi), hi - lo, ph_lo, ph_hi, steps)
