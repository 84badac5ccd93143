"""
Adjoint (regular) matrix representation of a quadratic Hamiltonian.

Two independent constructions are provided: the closed formula
H = (gamma + gamma^T) U and the column-by-column expansion of [h, O_i]
computed symbolically.  Both use the basis order (x_1..x_K, p_1..p_K).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NotClosedError
from .hamparse import GammaMatrix
from .opalg import OperatorPoly, basis_index, basis_symbols, commutator

FORMULA = "formula"
COMMUTATOR = "commutator"


@dataclass(frozen=True)
class UMatrix:
    """Commutator table [O_i, O_j] = U_ij of the canonical basis."""

    K: int
    entries: np.ndarray


@dataclass(frozen=True)
class AdjointMatrix:
    K: int
    entries: np.ndarray
    provenance: str = FORMULA

    @property
    def dim(self) -> int:
        return 2 * self.K


@dataclass(frozen=True)
class PseudoHermReport:
    residual_pseudo: float
    residual_antireal: float
    tol: float
    passed: bool


def build_U(K: int) -> UMatrix:
    if K < 1:
        raise DimensionError("K must be >= 1")
    eye = np.eye(K)
    zero = np.zeros((K, K))
    return UMatrix(K, 1j * np.block([[zero, eye], [-eye, zero]]))


def adjoint_matrix(gamma: GammaMatrix) -> AdjointMatrix:
    g = np.asarray(gamma.entries, dtype=complex)
    if g.shape != (2 * gamma.K, 2 * gamma.K):
        raise DimensionError(f"gamma has shape {g.shape}, expected {(2 * gamma.K,) * 2}")
    return AdjointMatrix(gamma.K, (g + g.T) @ build_U(gamma.K).entries, FORMULA)


def adjoint_matrix_via_commutators(h: OperatorPoly) -> AdjointMatrix:
    """Column i holds the coefficients of [h, O_i] over the linear basis."""
    K = h.K
    syms = basis_symbols(K)
    H = np.zeros((2 * K, 2 * K), dtype=complex)
    for i, s in enumerate(syms):
        c = commutator(h, OperatorPoly.symbol(K, s))
        for w, v in c.terms.items():
            if len(w) != 1:
                raise NotClosedError(
                    f"[h, {s}] has a degree-{len(w)} component {w!r}; h is not a homogeneous quadratic"
                )
            H[basis_index(w[0], K), i] = v
    return AdjointMatrix(K, H, COMMUTATOR)


def max_norm(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def verify_pseudo_hermiticity(H: AdjointMatrix, U: UMatrix, tol: float = 1e-10) -> PseudoHermReport:
    """Check H^dagger U = U H and H^dagger = -H^T, relative to max(1, |H|_max)."""
    h = np.asarray(H.entries)
    u = np.asarray(U.entries)
    if h.shape != u.shape:
        raise DimensionError(f"H has shape {h.shape} but U has shape {u.shape}")
    scale = max(1.0, max_norm(h))
    hd = h.conj().T
    r_pseudo = max_norm(hd @ u - u @ h) / scale
    r_anti = max_norm(hd + h.T) / scale
    return PseudoHermReport(r_pseudo, r_anti, tol, r_pseudo <= tol and r_anti <= tol)
