"""Acceptance criteria 1-12.

Each test prints one ``criterion N: PASS|FAIL ...`` line (also repeated in
the terminal summary) and then asserts at the stated tolerance.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from conftest import ACCEPTANCE_LINES, random_hermitian_gamma
from oracles import (
    PRINTED,
    gainloss_poly,
    lrc_kirchhoff_rhs,
    lrc_poly,
    lrc_xi,
    selfforce_poly,
    selfforce_poly_scale,
    toy2d_four_a,
)
from quadham.adjrep import adjoint_matrix, adjoint_matrix_via_commutators, build_U, max_norm
from quadham.catalog import CATALOG, build
from quadham.dynamics import estimate_frequencies, evolution_matrix, growth_rate, integrate
from quadham.export import unique_frequencies
from quadham.spectra import (
    REAL,
    classify,
    clusters,
    constant_of_motion_residual,
    eigen,
    ground_energy,
    ladder_residual,
    ladder_vectors,
    pseudo_gram,
    is_real_value,
    CLUSTER_TOL,
)
from quadham.sweep import find_boundary

SEED = 1729


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def draw_params(model, rng):
    u = rng.uniform
    if model == "toy1d":
        return {"alpha": u(0.1, 3), "beta": u(-3, 3)}
    if model == "toy2d":
        return {"beta": u(-4, 4)}
    if model == "gainloss":
        return {"omega": u(0.2, 2), "gamma": u(0, 1.5), "epsilon": u(-1.5, 1.5)}
    if model == "selfforce":
        return {"m": u(0.3, 2), "tau": u(0.3, 2), "k": u(-2, 2), "A": u(-2, 2), "B": u(-2, 2)}
    if model == "lrc":
        return {"mu": u(-0.9, 0.9), "gamma": u(0, 1.5)}
    raise KeyError(model)


@pytest.fixture(scope="module")
def corpus():
    """1000 random Hermitian gammas, K = 1..8."""
    rng = np.random.default_rng(SEED)
    return [random_hermitian_gamma(rng, int(rng.integers(1, 9))) for _ in range(1000)]


def test_c01_printed_matrices():
    rng = np.random.default_rng(SEED + 1)
    worst, n = 0.0, 0
    for model in CATALOG:
        for _ in range(3):
            q = draw_params(model, rng)
            H = build(model, q).adjoint.entries
            worst = max(worst, float(np.max(np.abs(H - PRINTED[model](**q)))))
            n += 1
    record(1, worst <= 1e-12, f"printed adjoint matrices: max |dH| = {worst:.1e} over {n} draws (tol 1e-12)")


def test_c02_two_oracles(corpus):
    worst = 0.0
    for g in corpus:
        d = adjoint_matrix(g).entries - adjoint_matrix_via_commutators(g.to_poly()).entries
        worst = max(worst, float(np.max(np.abs(d))))
    record(2, worst <= 1e-12, f"formula vs commutator route: max |dH| = {worst:.1e} on {len(corpus)} models (tol 1e-12)")


def test_c03_pseudo_hermiticity(corpus):
    worst_p, worst_a = 0.0, 0.0
    for g in corpus:
        H = adjoint_matrix(g).entries
        U = build_U(g.K).entries
        Hd = H.conj().T
        worst_p = max(worst_p, max_norm(Hd @ U - U @ H) / max(1.0, max_norm(H)))
        worst_a = max(worst_a, max_norm(Hd + H.T))
    ok = worst_p <= 1e-10 and worst_a <= 1e-12
    record(3, ok, f"pseudo-Hermiticity: rel |H^+U-UH| = {worst_p:.1e} (tol 1e-10), |H^+ + H^T| = {worst_a:.1e} (tol 1e-12)")


def test_c04_charpoly_oracles():
    rng = np.random.default_rng(SEED + 4)
    worst = {"gainloss": 0.0, "selfforce": 0.0, "lrc": 0.0}
    for _ in range(100):
        q = draw_params("gainloss", rng)
        om, ga, ep = q["omega"], q["gamma"], q["epsilon"]
        for lam in eigen(build("gainloss", q).adjoint).values:
            xi = lam**2
            scale = abs(xi) ** 2 + 2 * abs(xi) * abs(2 * ga**2 - om**2) + ep**2 + om**4
            worst["gainloss"] = max(worst["gainloss"], abs(gainloss_poly(om, ga, ep, xi)) / scale)
        q = draw_params("selfforce", rng)
        for lam in eigen(build("selfforce", q).adjoint).values:
            xi = lam**2
            r = abs(selfforce_poly(xi=xi, **q)) / selfforce_poly_scale(xi=xi, **q)
            worst["selfforce"] = max(worst["selfforce"], r)
        q = draw_params("lrc", rng)
        mu, g = q["mu"], q["gamma"]
        for lam in eigen(build("lrc", q).adjoint).values:
            xi = lam**2
            scale = abs(xi) ** 2 * abs(mu**2 - 1) + abs(xi) * (g**2 * abs(mu**2 - 1) + 2) + 1
            worst["lrc"] = max(worst["lrc"], abs(lrc_poly(mu, g, xi)) / scale)
    ok = max(worst.values()) <= 1e-8
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record(4, ok, f"characteristic polynomials at lambda^2, 100 draws each: {detail} (tol 1e-8 rel)")


def _nearest_rel(values, target):
    values = np.asarray(values, dtype=complex)
    return float(np.min(np.abs(values - target)) / abs(target))


def test_c05_closed_form_roots():
    rng = np.random.default_rng(SEED + 5)
    worst = {}
    for _ in range(25):
        q = draw_params("toy1d", rng)
        lam = np.sqrt(complex(4 * q["alpha"] - q["beta"] ** 2))
        vals = eigen(build("toy1d", q).adjoint).values
        r = max(_nearest_rel(vals, lam), _nearest_rel(vals, -lam))
        worst["toy1d"] = max(worst.get("toy1d", 0), r)

        q = draw_params("toy2d", rng)
        vals = eigen(build("toy2d", q).adjoint).values
        r = 0.0
        for xi in (2 * (2 - q["beta"]), 2 * (2 + q["beta"])):
            lam = np.sqrt(complex(xi))
            r = max(r, _nearest_rel(vals, lam), _nearest_rel(vals, -lam))
        worst["toy2d"] = max(worst.get("toy2d", 0), r)

        q = draw_params("lrc", rng)
        vals = eigen(build("lrc", q).adjoint).values
        r = 0.0
        for xi in lrc_xi(q["mu"], q["gamma"]):
            lam = np.sqrt(complex(xi))
            r = max(r, _nearest_rel(vals, lam), _nearest_rel(vals, -lam))
        worst["lrc"] = max(worst.get("lrc", 0), r)

        q = draw_params("selfforce", rng)
        m, tau, B = q["m"], q["tau"], q["B"]
        xi = (B**2 - m**2) / (m**2 * tau**2)
        vals = eigen(build("selfforce", q).adjoint).values
        worst["selfforce"] = max(worst.get("selfforce", 0), _nearest_rel(vals**2, xi))
    ok = max(worst.values()) <= 1e-10
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record(5, ok, f"closed-form roots vs eigenvalues: {detail} (tol 1e-10 rel)")


def test_c06_phase_boundaries():
    out = []
    ok = True
    for model, params in (("toy2d", {}), ("toy1d", {"alpha": 1.0})):
        t0 = time.perf_counter()
        res = find_boundary(model, params, "beta", (1.0, 3.0), tol=1e-6)
        dt = time.perf_counter() - t0
        ok &= abs(res.critical_value - 2.0) <= 1e-6 and dt < 1.0
        out.append(f"{model} beta_c = {res.critical_value:.6f} in {dt:.2f}s")
    record(6, ok, "bisection: " + ", ".join(out) + " (tol 1e-6, < 1 s)")


def test_c07_pseudo_orthogonality():
    rng = np.random.default_rng(SEED + 7)
    worst_cross, worst_diag, n_cplx = 0.0, 0.0, 0
    for _ in range(100):
        g = random_hermitian_gamma(rng, int(rng.integers(1, 9)))
        s = eigen(adjoint_matrix(g))
        G = pseudo_gram(s)
        lam = s.values
        sep = 10 * CLUSTER_TOL * s.scale
        for i in range(len(lam)):
            if not is_real_value(lam[i]):
                worst_diag = max(worst_diag, abs(G[i, i]))
                n_cplx += 1
            for j in range(len(lam)):
                if abs(lam[j] - np.conj(lam[i])) > sep:
                    worst_cross = max(worst_cross, abs(G[i, j]))
    ok = worst_cross <= 1e-9 and worst_diag <= 1e-9
    record(
        7,
        ok,
        f"pseudo-orthogonality on 100 random models: cross {worst_cross:.1e}, "
        f"complex self {worst_diag:.1e} over {n_cplx} complex eigenvalues (tol 1e-9)",
    )


def _simple_real(s):
    out = []
    for grp in clusters(s.values, CLUSTER_TOL * s.scale):
        if len(grp) == 1 and is_real_value(s.values[grp[0]]):
            out.append(grp[0])
    return out


def test_c08_ladder_and_constants():
    rng = np.random.default_rng(SEED + 8)
    points = []
    for model, spec in CATALOG.items():
        for _ in range(3):
            points.append((model, {k: v * (1 + 0.05 * rng.uniform(-1, 1)) for k, v in spec.defaults.items()}))
    # default-adjacent points where gainloss and selfforce keep real eigenvalues
    points.append(("gainloss", {"epsilon": 0.9}))
    points.append(("selfforce", {"A": 0.5, "B": 2.0}))
    worst_l, worst_c, count = 0.0, 0.0, {}
    for model, q in points:
        inst = build(model, q)
        s = eigen(inst.adjoint)
        Zs = ladder_vectors(s)
        for k in _simple_real(s):
            worst_l = max(worst_l, ladder_residual(inst.poly, Zs[k]))
            worst_c = max(worst_c, constant_of_motion_residual(inst.poly, Zs[k]))
            count[model] = count.get(model, 0) + 1
    ok = worst_l <= 1e-10 and worst_c <= 1e-10 and set(count) == set(CATALOG)
    per = ", ".join(f"{m} {c}" for m, c in count.items())
    record(8, ok, f"ladder {worst_l:.1e}, constant of motion {worst_c:.1e} on simple real eigenvalues ({per}) (tol 1e-10)")


def test_c09_ground_energies():
    e1 = ground_energy(eigen(build("toy1d", {"alpha": 1, "beta": 1}).adjoint))
    d1 = abs(e1 - math.sqrt(3) / 2)
    e2 = ground_energy(eigen(build("toy2d", {"beta": 1}).adjoint))
    d2 = abs(e2 - toy2d_four_a(1.0))
    record(9, d1 <= 1e-12 and d2 <= 1e-10, f"E0 toy1d off by {d1:.1e} (tol 1e-12), toy2d vs 4a off by {d2:.1e} (tol 1e-10)")


def test_c10_dynamics():
    details, ok = [], True
    real_cases = [("toy1d", {"alpha": 1, "beta": 1}), ("toy2d", {"beta": 1}), ("lrc", {"mu": 0.2, "gamma": 0.1})]
    broken_cases = [("toy1d", {"alpha": 1, "beta": 3}), ("gainloss", {"omega": 1, "gamma": 0.5, "epsilon": 1.5})]
    worst_eig = 0.0
    for model, q in real_cases + broken_cases:
        t0 = time.perf_counter()
        inst = build(model, q)
        s = eigen(inst.adjoint)
        M = evolution_matrix(inst.adjoint)
        mu = np.linalg.eigvals(M.entries)
        worst_eig = max(worst_eig, max(float(np.min(np.abs(mu - 1j * lam))) for lam in s.values))
        tr = integrate(M, None, T=200, dt=0.01)
        if classify(s).label == REAL:
            want = unique_frequencies(s.values)
            got = sorted(estimate_frequencies(tr))
            if len(got) != len(want):
                err = math.inf
            else:
                err = max(abs(a - b) / b for a, b in zip(got, want))
            what = "freq"
        else:
            want = float(np.max(np.abs(s.values.imag)))
            err = abs(growth_rate(tr) - want) / want
            what = "growth"
        dt = time.perf_counter() - t0
        ok &= err <= 1e-3 and dt < 5.0
        details.append(f"{model} {what} {err:.1e} ({dt:.2f}s)")
    ok &= worst_eig <= 1e-10
    record(10, ok, "dynamics rel errors: " + ", ".join(details) + f"; eig(M) vs i eig(H) {worst_eig:.1e}")


def test_c11_lrc_kirchhoff():
    rng = np.random.default_rng(SEED + 11)
    worst = 0.0
    for _ in range(5):
        mu, g = rng.uniform(-0.6, 0.6), rng.uniform(0, 0.3)
        q0 = rng.normal(size=2)
        v0 = rng.normal(size=2)
        z0 = [q0[0], q0[1], v0[1] + g * q0[1] / 2, v0[0] - g * q0[0] / 2]
        tr = integrate(evolution_matrix(build("lrc", {"mu": mu, "gamma": g}).adjoint), z0, T=50, dt=0.01)
        sol = solve_ivp(
            lrc_kirchhoff_rhs(mu, g), (0, 50), [*q0, *v0], t_eval=tr.times, rtol=1e-12, atol=1e-13, method="DOP853"
        )
        worst = max(worst, float(np.max(np.abs(tr.states[:, :2] - sol.y[:2].T))))
    record(11, worst <= 1e-6, f"LRC charges vs direct circuit integration over T=50: max error {worst:.1e} (tol 1e-6)")


def test_c12_selfforce_never_real():
    rng = np.random.default_rng(SEED + 12)
    labels = {}
    for _ in range(100):
        m, tau, k = np.exp(rng.uniform(np.log(0.05), np.log(20), size=3))
        lab = classify(eigen(build("selfforce", {"m": m, "tau": tau, "k": k, "A": 0, "B": 0}).adjoint)).label
        labels[lab] = labels.get(lab, 0) + 1
    record(12, REAL not in labels, f"selfforce A=B=0 over 100 draws: {labels}")
