"""
The five reference models, with closed-form characteristic polynomials in
xi = lambda^2 and their roots.

====================  ===  ==================================
id                    K    parameters (defaults)
====================  ===  ==================================
toy1d                 1    alpha=1, beta=1
toy2d                 2    beta=1
gainloss              2    omega=1, gamma=0.5, epsilon=0.1
selfforce             4    m=1, tau=1, k=1, A=0, B=0
lrc                   2    mu=0.2, gamma=0.1
====================  ===  ==================================
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .adjrep import AdjointMatrix, adjoint_matrix
from .errors import InstantiationError, MissingParameterError, UnknownModelError
from .hamparse import GammaMatrix, extract_gamma, parse
from .opalg import OperatorPoly


@dataclass(frozen=True)
class ModelSpec:
    """A named Hamiltonian expression with default parameter values.

    A default of ``None`` marks a parameter that must be supplied.
    """

    id: str
    K: int
    expression: str
    defaults: Mapping[str, Optional[float]] = field(default_factory=dict)
    validate: Optional[Callable[[Mapping[str, float]], None]] = field(default=None, compare=False)

    @property
    def param_names(self) -> list[str]:
        return list(self.defaults)

    def bind(self, params: Optional[Mapping[str, float]] = None) -> dict:
        params = dict(params or {})
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise InstantiationError(
                f"model {self.id!r} has no parameter(s) {sorted(unknown)}; known: {self.param_names}"
            )
        bound = {}
        for name, default in self.defaults.items():
            value = params.get(name, default)
            if value is None:
                raise MissingParameterError(f"parameter {name!r} of model {self.id!r} is not bound")
            bound[name] = float(value)
        if self.validate is not None:
            self.validate(bound)
        return bound


def _check_lrc(params):
    if abs(params["mu"] ** 2 - 1.0) < 1e-12:
        raise InstantiationError("lrc is singular at |mu| = 1")


def _check_selfforce(params):
    if params["m"] == 0 or params["tau"] == 0:
        raise InstantiationError("selfforce needs m != 0 and tau != 0")


CATALOG: dict[str, ModelSpec] = {
    "toy1d": ModelSpec(
        "toy1d", 1, "p^2 + alpha*x^2 + (beta/2)*(x*p + p*x)", {"alpha": 1.0, "beta": 1.0}
    ),
    "toy2d": ModelSpec("toy2d", 2, "px^2 + py^2 + x^2 + y^2 + beta*x*y", {"beta": 1.0}),
    "gainloss": ModelSpec(
        "gainloss",
        2,
        "px*py + gamma*(y*py - x*px) + (omega^2 - gamma^2)*x*y + (epsilon/2)*(x^2 + y^2)",
        {"omega": 1.0, "gamma": 0.5, "epsilon": 0.1},
    ),
    "selfforce": ModelSpec(
        "selfforce",
        4,
        "B*(w*pz - z*pw)/(m*tau) + 2*pz*pw/(m*tau^2) + (px*pw - py*pz)/(m*tau)"
        " - m*z*w/2 + (w*py + z*px)/2 + k*x*y + A*(x^2 + y^2)/2",
        {"m": 1.0, "tau": 1.0, "k": 1.0, "A": 0.0, "B": 0.0},
        _check_selfforce,
    ),
    "lrc": ModelSpec(
        "lrc",
        2,
        "px*py + (gamma/2)*(x*px - y*py) + (1/(1 - mu^2) - gamma^2/4)*x*y"
        " - (mu/(2*(1 - mu^2)))*(x^2 + y^2)",
        {"mu": 0.2, "gamma": 0.1},
        _check_lrc,
    ),
}


def get_model(model: Union[str, ModelSpec]) -> ModelSpec:
    if isinstance(model, ModelSpec):
        return model
    try:
        return CATALOG[model]
    except KeyError:
        raise UnknownModelError(f"unknown model {model!r}; available: {sorted(CATALOG)}") from None


@dataclass(frozen=True)
class Instance:
    model: ModelSpec
    params: dict
    poly: OperatorPoly
    gamma: GammaMatrix
    adjoint: AdjointMatrix


def build(model, params=None, permissive: bool = False) -> Instance:
    spec = get_model(model)
    bound = spec.bind(params)
    poly = parse(spec.expression, bound, spec.K)
    gamma = extract_gamma(poly, permissive=permissive)
    return Instance(spec, bound, poly, gamma, adjoint_matrix(gamma))


def instantiate(model, params=None) -> tuple[GammaMatrix, AdjointMatrix]:
    inst = build(model, params)
    return inst.gamma, inst.adjoint


# -- closed forms --------------------------------------------------------------


def charpoly_xi(model, params=None) -> np.ndarray:
    """Characteristic polynomial in xi = lambda^2, highest degree first."""
    spec = get_model(model)
    if spec.id not in CATALOG or CATALOG[spec.id] is not spec:
        raise UnknownModelError(f"no closed form for model {spec.id!r}")
    q = spec.bind(params)
    if spec.id == "toy1d":
        return np.array([1.0, -(4 * q["alpha"] - q["beta"] ** 2)])
    if spec.id == "toy2d":
        return np.polymul([1.0, -2 * (2 - q["beta"])], [1.0, -2 * (2 + q["beta"])])
    if spec.id == "gainloss":
        om, g, eps = q["omega"], q["gamma"], q["epsilon"]
        return np.array([1.0, 2 * (2 * g**2 - om**2), om**4 - eps**2])
    if spec.id == "selfforce":
        m, tau, k, A, B = q["m"], q["tau"], q["k"], q["A"], q["B"]
        linear = [m**2 * tau**2, m**2 - B**2]
        cubic = [m**2 * tau**2, m**2 - B**2, 2 * (A * B - k * m), k**2 - A**2]
        return np.polymul(linear, cubic)
    mu, g = q["mu"], q["gamma"]
    return np.array([mu**2 - 1, g**2 * (mu**2 - 1) + 2, -1.0])


def solve_quadratic(a, b, c) -> list[complex]:
    if a == 0:
        return [complex(-c / b)]
    sq = cmath.sqrt(b * b - 4 * a * c)
    # avoid cancellation between -b and the root
    qq = -0.5 * (b + sq) if (b.real if isinstance(b, complex) else b) >= 0 else -0.5 * (b - sq)
    if qq == 0:
        return [0j, 0j]
    return [complex(qq / a), complex(c / qq)]


def solve_cubic(a, b, c, d, polish: int = 3) -> list[complex]:
    """Roots of a xi^3 + b xi^2 + c xi + d via the depressed cubic, Newton-polished."""
    if a == 0:
        return solve_quadratic(b, c, d)
    b, c, d = b / a, c / a, d / a
    shift = b / 3
    pp = c - b * b / 3
    qq = 2 * b**3 / 27 - b * c / 3 + d
    if abs(pp) < 1e-300 and abs(qq) < 1e-300:
        ts = [0j, 0j, 0j]
    else:
        disc = cmath.sqrt(qq * qq / 4 + pp**3 / 27)
        u3 = -qq / 2 + disc
        if abs(u3) < abs(-qq / 2 - disc):
            u3 = -qq / 2 - disc
        u = u3 ** (1 / 3) if u3 != 0 else 0j
        omega = cmath.exp(2j * cmath.pi / 3)
        ts = []
        for j in range(3):
            uj = u * omega**j
            ts.append(uj - pp / (3 * uj) if uj != 0 else 0j)
    roots = []
    for t in ts:
        r = t - shift
        for _ in range(polish):
            f = ((r + b) * r + c) * r + d
            df = (3 * r + 2 * b) * r + c
            if df == 0:
                break
            step = f / df
            if not cmath.isfinite(step):
                break
            r -= step
        roots.append(complex(r))
    return roots


def closed_form_roots(model, params=None) -> np.ndarray:
    """The xi = lambda^2 roots from the models' closed forms."""
    spec = get_model(model)
    if spec.id not in CATALOG or CATALOG[spec.id] is not spec:
        raise UnknownModelError(f"no closed form for model {spec.id!r}")
    q = spec.bind(params)
    if spec.id == "toy1d":
        roots = [4 * q["alpha"] - q["beta"] ** 2]
    elif spec.id == "toy2d":
        roots = [2 * (2 - q["beta"]), 2 * (2 + q["beta"])]
    elif spec.id == "gainloss":
        a, b, c = charpoly_xi(spec, q)
        roots = solve_quadratic(a, b, c)
    elif spec.id == "selfforce":
        m, tau, k, A, B = q["m"], q["tau"], q["k"], q["A"], q["B"]
        roots = [(B**2 - m**2) / (m**2 * tau**2)]
        roots += solve_cubic(m**2 * tau**2, m**2 - B**2, 2 * (A * B - k * m), k**2 - A**2)
    elif spec.id == "lrc":
        roots = list(lrc_roots(q["mu"], q["gamma"]))
    else:
        raise UnknownModelError(f"no closed form for model {spec.id!r}")
    return np.array(roots, dtype=complex)


def lrc_roots(mu: float, gamma: float) -> tuple[complex, complex]:
    a = mu**2 - 1
    sq = cmath.sqrt(gamma**4 * a**2 + 4 * gamma**2 * a + 4 * mu**2)
    xi1 = (sq + gamma**2 * (1 - mu**2) - 2) / (2 * a)
    xi2 = (sq + gamma**2 * a + 2) / (2 * (1 - mu**2))
    return xi1, xi2
