"""
Spectra of adjoint matrices: eigenpairs, pseudo-norms, pairing, phase labels.

Adjoint matrices are small (2K <= 64), non-normal and may be defective, so
``eigen`` runs LAPACK's Hessenberg/QR driver and, for 2K <= 8, cross-checks
the eigenvalues against roots of the characteristic polynomial obtained
independently (Faddeev-LeVerrier coefficients, Aberth iteration).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adjrep import AdjointMatrix, UMatrix, build_U, max_norm
from .errors import NumericalFailure, PairingError, PhaseError
from .opalg import OperatorPoly, adjoint, commutator, multiply

log = logging.getLogger(__name__)

REAL = "Real"
BROKEN = "Broken"
EXCEPTIONAL = "Exceptional"

REALITY_TOL = 1e-9
EP_TOL = 1e-7
PAIRING_TOL = 1e-8
RESIDUAL_TOL = 1e-10
# eigenvalues closer than this (relative to max(1, |H|)) are one cluster
CLUSTER_TOL = 1e-7
# singular values of H - mu I below this count towards geometric multiplicity
RANK_TOL = 1e-6
MAX_DIM = 64
CROSSCHECK_MAX_DIM = 8


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition of an adjoint matrix.

    ``vectors[:, k]`` is the unit eigenvector for ``values[k]``; values are
    sorted by (Re, Im).  ``crosscheck`` is the largest relative distance from
    an eigenvalue to the nearest characteristic-polynomial root, or ``None``
    when the cross-check was not run.
    """

    K: int
    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    pseudo_norms: np.ndarray
    matrix: np.ndarray
    crosscheck: Optional[float] = None

    @property
    def scale(self) -> float:
        return max(1.0, max_norm(self.matrix))


@dataclass(frozen=True)
class PhaseLabel:
    label: str
    max_im: float
    min_pseudo_norm: float


@dataclass(frozen=True)
class LadderVector:
    """Z = sum_i coefficients[i] O_i with [H, Z] = eigenvalue * Z."""

    coefficients: np.ndarray
    eigenvalue: complex


@dataclass(frozen=True)
class Pairing:
    """``pm_pairs`` holds (-lambda, +lambda); ``ordered`` is the real part in
    the order -l_K < ... < -l_1 <= 0 <= l_1 < ... < l_K, complex pairs after."""

    pm_pairs: list
    conjugate_pairs: list
    ordered: list


# -- characteristic polynomial cross-check ----------------------------------


def charpoly(a: np.ndarray) -> np.ndarray:
    """Coefficients of det(lambda I - a), highest degree first (Faddeev-LeVerrier)."""
    n = a.shape[0]
    c = np.zeros(n + 1, dtype=complex)
    c[0] = 1.0
    m = np.zeros_like(a, dtype=complex)
    eye = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + c[k - 1] * eye
        c[k] = -np.trace(a @ m) / k
    return c


def aberth_roots(coeffs, maxiter: int = 500, tol: float = 1e-14) -> np.ndarray:
    """All roots of a polynomial by Aberth-Ehrlich simultaneous iteration."""
    c = np.asarray(coeffs, dtype=complex)
    c = c / c[0]
    n = len(c) - 1
    if n == 0:
        return np.zeros(0, dtype=complex)
    dc = np.polyder(c)
    # Cauchy-type radius bound, points spread on a circle off the real axis
    r = 1.0 + np.max(np.abs(c[1:]))
    z = 0.5 * r * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(maxiter):
        pz = np.polyval(c, z)
        dz = np.polyval(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.max(np.abs(w)) <= tol * max(1.0, np.max(np.abs(z))):
            break
    return z


def _crosscheck(h: np.ndarray, values: np.ndarray) -> float:
    roots = aberth_roots(charpoly(h))
    return float(
        max(
            (np.min(np.abs(roots - v)) / max(1.0, abs(v)) for v in values),
            default=0.0,
        )
    )


# -- eigen-decomposition ----------------------------------------------------


def _entries(H) -> tuple[np.ndarray, int]:
    if isinstance(H, AdjointMatrix):
        return np.asarray(H.entries, dtype=complex), H.K
    h = np.asarray(H, dtype=complex)
    return h, h.shape[0] // 2


def clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage groups of eigenvalue indices closer than ``tol``."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def geometric_multiplicity(h: np.ndarray, mu: complex, scale: float) -> int:
    sv = np.linalg.svd(h - mu * np.eye(h.shape[0]), compute_uv=False)
    return int(np.sum(sv <= RANK_TOL * scale))


def _null_vector(h: np.ndarray, lam: complex) -> np.ndarray:
    _, _, vh = np.linalg.svd(h - lam * np.eye(h.shape[0]))
    return vh[-1].conj()


def eigen(H, residual_tol: float = RESIDUAL_TOL) -> Spectrum:
    """Eigenvalues, unit eigenvectors and pseudo-norms of an adjoint matrix.

    Exactly degenerate real eigenspaces are rotated so that their vectors are
    mutually U-orthogonal, which keeps C^dagger U C diagonal there too.
    """
    h, K = _entries(H)
    n = h.shape[0]
    if n > MAX_DIM:
        raise ValueError(f"matrix dimension {n} exceeds {MAX_DIM}")
    scale = max(1.0, max_norm(h))
    try:
        w, v = np.linalg.eig(h)
    except np.linalg.LinAlgError as exc:
        if n > CROSSCHECK_MAX_DIM:
            raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
        log.warning("LAPACK eig failed (%s); using characteristic-polynomial roots", exc)
        w = aberth_roots(charpoly(h))
        v = np.column_stack([_null_vector(h, lam) for lam in w])

    order = np.lexsort((w.imag, w.real))
    w = w[order]
    v = v[:, order]
    v = v / np.linalg.norm(v, axis=0)

    U = build_U(K).entries
    for group in clusters(w, CLUSTER_TOL * scale):
        if len(group) < 2:
            continue
        vals = w[group]
        if np.ptp(vals.real) + np.ptp(vals.imag) > 1e-11 * scale:
            continue
        mu = vals.mean()
        if abs(mu.imag) > REALITY_TOL * max(1.0, abs(mu)):
            continue
        if geometric_multiplicity(h, mu, scale) < len(group):
            continue
        vc = v[:, group]
        G = vc.conj().T @ U @ vc
        _, q = np.linalg.eigh((G + G.conj().T) / 2)
        vc = vc @ q
        v[:, group] = vc / np.linalg.norm(vc, axis=0)

    residuals = np.linalg.norm(h @ v - v * w, axis=0) / scale
    pn = np.einsum("ik,ij,jk->k", v.conj(), U, v)
    cross = _crosscheck(h, w) if n <= CROSSCHECK_MAX_DIM else None
    out = Spectrum(K, w, v, residuals, pn, h, cross)
    if np.max(residuals, initial=0.0) > residual_tol:
        raise NumericalFailure(
            f"eigenpair residual {np.max(residuals):.3e} exceeds {residual_tol:.1e}", partial=out
        )
    return out


def pseudo_norm(C, U) -> complex:
    """C^dagger U C for C scaled to unit Euclidean length."""
    c = np.asarray(C, dtype=complex)
    nrm = np.linalg.norm(c)
    if nrm == 0:
        raise ValueError("zero vector has no pseudo-norm")
    c = c / nrm
    u = U.entries if isinstance(U, UMatrix) else np.asarray(U)
    return complex(c.conj() @ u @ c)


def pseudo_gram(s: Spectrum) -> np.ndarray:
    """Matrix G_ij = C_i^dagger U C_j over all eigenvectors."""
    U = build_U(s.K).entries
    return s.vectors.conj().T @ U @ s.vectors


def is_real_value(lam: complex, tol: float = REALITY_TOL) -> bool:
    return abs(lam.imag) <= tol * max(1.0, abs(lam))


def classify(s: Spectrum, reality_tol: float = REALITY_TOL, ep_tol: float = EP_TOL) -> PhaseLabel:
    """Label the spectrum Real, Broken or Exceptional.

    Imaginary parts are judged on cluster means, so the sqrt(eps) splitting
    of a numerically perturbed Jordan block does not read as Broken.  A
    cluster whose geometric multiplicity is below its size is defective.
    """
    vals = s.values
    max_im = float(np.max(np.abs(vals.imag), initial=0.0))
    min_pn = float(np.min(np.abs(s.pseudo_norms), initial=np.inf))
    scale = s.scale
    groups = clusters(vals, CLUSTER_TOL * scale)
    broken = False
    defective = False
    for group in groups:
        mu = vals[group].mean()
        if abs(mu.imag) > reality_tol * max(1.0, abs(mu)):
            broken = True
        elif len(group) > 1 and geometric_multiplicity(s.matrix, mu, scale) < len(group):
            defective = True
    if broken:
        label = BROKEN
    elif defective or min_pn <= ep_tol:
        label = EXCEPTIONAL
    elif any(not is_real_value(v, reality_tol) for v in vals):
        label = EXCEPTIONAL
    else:
        label = REAL
    return PhaseLabel(label, max_im, min_pn)


def _pm_key(lam):
    # the "+lambda" member: positive real part, or positive imaginary part on the axis
    return (lam.real, lam.imag)


def pair_spectrum(values, tol: float = PAIRING_TOL) -> Pairing:
    """Partition eigenvalues into {-lambda, +lambda} pairs.

    Raises
    ------
    PairingError
        a value has no negated partner within ``tol * max(1, |lambda|)``.
    """
    vals = [complex(v) for v in values]
    n = len(vals)
    free = set(range(n))
    pm = []
    for i in sorted(range(n), key=lambda k: -abs(vals[k])):
        if i not in free:
            continue
        free.discard(i)
        if not free:
            raise PairingError(f"eigenvalue {vals[i]} left without a partner")
        j = min(free, key=lambda k: abs(vals[i] + vals[k]))
        if abs(vals[i] + vals[j]) > tol * max(1.0, abs(vals[i])):
            raise PairingError(f"eigenvalue {vals[i]} has no -lambda partner (closest {vals[j]})")
        free.discard(j)
        a, b = sorted((vals[i], vals[j]), key=_pm_key)
        pm.append((a, b))

    conj = []
    for k, v in enumerate(vals):
        if is_real_value(v, tol) or v.imag < 0:
            continue
        j = min((q for q in range(n) if q != k), key=lambda q: abs(vals[q] - v.conjugate()))
        if abs(vals[j] - v.conjugate()) > tol * max(1.0, abs(v)):
            raise PairingError(f"eigenvalue {v} has no conjugate partner")
        conj.append((vals[j], v))

    real_pairs = sorted((p for p in pm if is_real_value(p[1], tol)), key=lambda p: abs(p[1]))
    cplx_pairs = sorted((p for p in pm if not is_real_value(p[1], tol)), key=lambda p: _pm_key(p[1]))
    ordered = [p[0].real for p in reversed(real_pairs)] + [p[1].real for p in real_pairs]
    ordered = [complex(v) for v in ordered]
    for a, b in cplx_pairs:
        ordered.extend([a, b])
    return Pairing(real_pairs + cplx_pairs, conj, ordered)


def ladder_vectors(s: Spectrum) -> list[LadderVector]:
    return [LadderVector(s.vectors[:, k].copy(), complex(s.values[k])) for k in range(len(s.values))]


def ladder_operator(K: int, Z: LadderVector) -> OperatorPoly:
    return OperatorPoly.linear(K, Z.coefficients)


def ladder_residual(h: OperatorPoly, Z: LadderVector) -> float:
    """max |coeff| of [h, Z] - lambda Z; for real lambda also of [h, Z^+] + lambda Z^+."""
    z = ladder_operator(h.K, Z)
    lam = Z.eigenvalue
    r = (commutator(h, z) - lam * z).max_abs()
    if is_real_value(lam):
        zd = adjoint(z)
        r = max(r, (commutator(h, zd) + lam.conjugate() * zd).max_abs())
    return r


def constant_of_motion_residual(h: OperatorPoly, Z: LadderVector) -> Optional[float]:
    """max |coeff| of [h, Z^+ Z]; ``None`` when lambda is complex (not applicable)."""
    if not is_real_value(Z.eigenvalue):
        return None
    z = ladder_operator(h.K, Z)
    number = multiply(adjoint(z), z)
    return commutator(h, number).max_abs()


def ground_energy(s: Spectrum, reality_tol: float = REALITY_TOL, ep_tol: float = EP_TOL) -> float:
    """Half the sum of the K positive frequencies."""
    phase = classify(s, reality_tol, ep_tol)
    if phase.label != REAL:
        raise PhaseError(f"ground energy needs a Real spectrum, got {phase.label}")
    # eigenvalues come in +-lambda pairs, so sum_{positive} = sum |lambda| / 2
    return float(0.25 * np.sum(np.abs(s.values.real)))
