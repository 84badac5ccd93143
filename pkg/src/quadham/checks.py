"""Structural identity checks behind ``quadham verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .adjrep import AdjointMatrix, adjoint_matrix_via_commutators, build_U, max_norm, verify_pseudo_hermiticity
from .errors import PairingError
from .opalg import OperatorPoly
from .spectra import (
    CLUSTER_TOL,
    EXCEPTIONAL,
    Spectrum,
    classify,
    clusters,
    constant_of_motion_residual,
    eigen,
    is_real_value,
    ladder_residual,
    ladder_vectors,
    pair_spectrum,
    pseudo_gram,
)
from .tolerances import Tolerances

PASS = "pass"
FAIL = "fail"
NA = "n/a"

# a perturbed Jordan block splits its eigenvalue by ~sqrt(eps)
DEFECTIVE_PAIRING_TOL = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    value: Optional[float]
    tol: Optional[float]
    detail: str = ""


def _status(ok):
    return PASS if ok else FAIL


def pseudo_orthogonality_residual(s: Spectrum, tol: Tolerances) -> float:
    """Largest |C_i^+ U C_j| over pairs that must vanish.

    Pairs with lambda_j equal to conj(lambda_i) within the cluster tolerance
    are exempt; for complex lambda_i the diagonal entry must vanish too.
    """
    G = pseudo_gram(s)
    vals = s.values
    sep = CLUSTER_TOL * s.scale * 10
    worst = 0.0
    for i in range(len(vals)):
        for j in range(len(vals)):
            if i == j:
                if not is_real_value(vals[i], tol.reality):
                    worst = max(worst, abs(G[i, i]))
            elif abs(vals[j] - vals[i].conjugate()) > sep:
                worst = max(worst, abs(G[i, j]))
    return worst


def simple_real_indices(s: Spectrum, tol: Tolerances) -> list[int]:
    out = []
    for group in clusters(s.values, CLUSTER_TOL * s.scale):
        if len(group) == 1 and is_real_value(s.values[group[0]], tol.reality):
            out.append(group[0])
    return out


def run_checks(
    H: AdjointMatrix,
    h: Optional[OperatorPoly] = None,
    tol: Optional[Tolerances] = None,
    spectrum: Optional[Spectrum] = None,
) -> list[CheckResult]:
    """Run every identity check; checks needing the symbolic ``h`` are n/a without it."""
    tol = tol or Tolerances()
    results = []
    U = build_U(H.K)
    rep = verify_pseudo_hermiticity(H, U, tol.structural)
    results.append(
        CheckResult(
            "pseudo_hermiticity",
            _status(rep.passed),
            max(rep.residual_pseudo, rep.residual_antireal),
            tol.structural,
            f"|H^+U-UH|={rep.residual_pseudo:.3e} |H^+ + H^T|={rep.residual_antireal:.3e}",
        )
    )

    if h is not None:
        Hc = adjoint_matrix_via_commutators(h)
        diff = max_norm(np.asarray(H.entries) - Hc.entries) / max(1.0, max_norm(H.entries))
        results.append(CheckResult("two_oracle", _status(diff <= tol.oracle), diff, tol.oracle))
    else:
        results.append(CheckResult("two_oracle", NA, None, tol.oracle, "no Hamiltonian expression"))

    s = spectrum if spectrum is not None else eigen(H)
    phase = classify(s, tol.reality, tol.ep)
    ptol = max(tol.pairing, DEFECTIVE_PAIRING_TOL) if phase.label == EXCEPTIONAL else tol.pairing
    try:
        pair_spectrum(s.values, ptol)
        results.append(CheckResult("pairing", PASS, None, ptol))
    except PairingError as exc:
        results.append(CheckResult("pairing", FAIL, None, ptol, str(exc)))

    ortho = pseudo_orthogonality_residual(s, tol)
    results.append(
        CheckResult("pseudo_orthogonality", _status(ortho <= tol.orthogonality), ortho, tol.orthogonality)
    )

    if h is None:
        results.append(CheckResult("ladder", NA, None, tol.residual, "no Hamiltonian expression"))
        results.append(CheckResult("constant_of_motion", NA, None, tol.residual, "no Hamiltonian expression"))
        return results
    idx = simple_real_indices(s, tol)
    if not idx:
        results.append(CheckResult("ladder", NA, None, tol.residual, "no simple real eigenvalue"))
        results.append(CheckResult("constant_of_motion", NA, None, tol.residual, "no simple real eigenvalue"))
        return results
    ladders = ladder_vectors(s)
    lad = max(ladder_residual(h, ladders[k]) for k in idx)
    com = max(constant_of_motion_residual(h, ladders[k]) for k in idx)
    results.append(CheckResult("ladder", _status(lad <= tol.residual), lad, tol.residual, f"{len(idx)} eigenvalues"))
    results.append(
        CheckResult("constant_of_motion", _status(com <= tol.residual), com, tol.residual, f"{len(idx)} eigenvalues")
    )
    return results
