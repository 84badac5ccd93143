"""
Linear equations of motion generated by the adjoint matrix.

Heisenberg evolution dO_i/dt = i[H, O_i] = sum_j i H_ji O_j gives
dz/dt = M z with M = i H^T, real whenever gamma is real.  The same M is the
classical Hamiltonian flow, so trajectories carry the adjoint-matrix
frequencies (Real phase) or growth rates (Broken phase).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .adjrep import AdjointMatrix
from .errors import InconsistentModelError, PhaseError, TrajectoryTooShortError
from .spectra import REAL

OVERFLOW_NORM = 1e300


@dataclass(frozen=True)
class EvolutionMatrix:
    entries: np.ndarray
    imag_residual: float


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 2K)
    dt: float
    overflow: bool = False


def evolution_matrix(H, tol: float = 1e-12) -> EvolutionMatrix:
    h = H.entries if isinstance(H, AdjointMatrix) else np.asarray(H)
    full = 1j * np.asarray(h, dtype=complex).T
    resid = float(np.max(np.abs(full.imag), initial=0.0))
    if resid > tol * max(1.0, float(np.max(np.abs(full), initial=0.0))):
        raise InconsistentModelError(
            f"i*H^T has imaginary part {resid:.3e}; the model has no real equations of motion"
        )
    return EvolutionMatrix(np.ascontiguousarray(full.real), resid)


def rk4_propagator(M: np.ndarray, dt: float) -> np.ndarray:
    """One classical RK4 step for dz/dt = M z, as a matrix."""
    A = dt * np.asarray(M)
    n = A.shape[0]
    A2 = A @ A
    return np.eye(n) + A + A2 / 2 + A2 @ A / 6 + A2 @ A2 / 24


def default_initial_state(dim: int) -> np.ndarray:
    """(1, 2, ..., dim) at unit norm; unequal entries so mirror-symmetric
    models still get their antisymmetric modes excited."""
    z = np.arange(1.0, dim + 1.0)
    return z / np.linalg.norm(z)


def integrate(M, z0=None, T: float = 200.0, dt: float = 0.01) -> Trajectory:
    """Fixed-step RK4 from t=0 to T.

    Stops early, flagging ``overflow``, once the state is no longer finite or
    its norm passes ``OVERFLOW_NORM``.
    """
    m = M.entries if isinstance(M, EvolutionMatrix) else np.asarray(M, dtype=float)
    if dt <= 0:
        raise ValueError("dt must be positive")
    if T < 100 * dt:
        raise ValueError("horizon T must be at least 100 steps")
    dim = m.shape[0]
    z = default_initial_state(dim) if z0 is None else np.asarray(z0, dtype=float)
    if z.shape != (dim,):
        raise ValueError(f"initial state must have {dim} components")
    nsteps = int(math.floor(T / dt + 1e-9))
    P = rk4_propagator(m, dt)
    states = np.empty((nsteps + 1, dim))
    states[0] = z
    overflow = False
    last = nsteps
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, nsteps + 1):
            z = P @ z
            if not np.all(np.isfinite(z)) or np.linalg.norm(z) > OVERFLOW_NORM:
                overflow = True
                last = k - 1
                break
            states[k] = z
    times = dt * np.arange(last + 1)
    return Trajectory(times, states[: last + 1], dt, overflow)


def reference_trajectory(M, z0, times) -> np.ndarray:
    """Exact states exp(M t) z0 at the requested times."""
    m = M.entries if isinstance(M, EvolutionMatrix) else np.asarray(M, dtype=float)
    z0 = np.asarray(z0, dtype=float)
    return np.array([expm(m * t) @ z0 for t in times])


def estimate_frequencies(tr: Trajectory, rel_floor: float = 0.05, pad: int = 8) -> list[float]:
    """Angular frequencies of the dominant spectral peaks.

    Every component is Hann-windowed and zero-padded; the summed power
    spectrum is searched for local maxima above ``rel_floor`` of the largest,
    and each peak is refined by a parabola through the log-magnitudes of the
    three bins around it.
    """
    x = tr.states - tr.states.mean(axis=0)
    n = len(x)
    if n < 8:
        return []
    top = np.max(np.abs(x))
    if not np.isfinite(top) or top == 0:
        return []
    x = x / top
    win = np.hanning(n)[:, None]
    nfft = 1 << int(math.ceil(math.log2(n * pad)))
    spec = np.fft.rfft(x * win, n=nfft, axis=0)
    mag = np.sqrt(np.sum(np.abs(spec) ** 2, axis=1))
    peak = mag.max()
    if not np.isfinite(peak) or peak <= 0:
        return []
    found = []
    for k in range(1, len(mag) - 1):
        if mag[k] > mag[k - 1] and mag[k] >= mag[k + 1] and mag[k] >= rel_floor * peak:
            a, b, c = np.log(mag[k - 1 : k + 2])
            denom = a - 2 * b + c
            delta = 0.5 * (a - c) / denom if denom != 0 else 0.0
            found.append((k + delta) * 2 * math.pi / (nfft * tr.dt))
    return found


def growth_rate(tr: Trajectory, min_samples: int = 20, phase: str | None = None) -> float:
    """Least-squares slope of log|z(t)| over the final half of the trajectory.

    Passing the model's ``phase`` enforces the Broken-phase precondition.
    """
    if phase == REAL:
        raise PhaseError("growth rate is defined for Broken-phase trajectories only")
    n = len(tr.times)
    half = tr.times[n // 2 :]
    norms = np.linalg.norm(tr.states[n // 2 :], axis=1)
    if len(half) < min_samples:
        raise TrajectoryTooShortError(
            f"only {len(half)} samples in the final half (need {min_samples})"
        )
    slope, _ = np.polyfit(half, np.log(norms), 1)
    return float(slope)
