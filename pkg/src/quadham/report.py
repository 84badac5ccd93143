"""JSON documents: analysis reports, model files, matrix files."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .adjrep import AdjointMatrix, adjoint_matrix_via_commutators, build_U, verify_pseudo_hermiticity
from .catalog import Instance, ModelSpec, build
from .errors import PhaseError
from .spectra import classify, eigen, ground_energy
from .tolerances import Tolerances

SCHEMA = 1


# -- encoding ------------------------------------------------------------------


def _num(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    s = format(v, ".17g")
    # keep floats recognisable as floats
    return s if any(ch in s for ch in ".eEn") else s + ".0"


def _flat(v) -> bool:
    return isinstance(v, (list, tuple)) and all(not isinstance(e, (dict, list, tuple)) or _flat(e) for e in v)


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float at 17 significant digits.

    Lists holding no dicts are written on one line so matrices stay readable.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, int, float, np.integer, np.floating)):
        return _num(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if _flat(obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def cpair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def cmatrix(a) -> list:
    return [[cpair(v) for v in row] for row in np.asarray(a)]


def from_cpair(v) -> complex:
    return complex(v[0], v[1])


def from_cmatrix(rows) -> np.ndarray:
    return np.array([[from_cpair(v) for v in row] for row in rows], dtype=complex)


# -- analysis report -----------------------------------------------------------


@dataclass
class AnalysisReport:
    model: dict
    gamma: dict
    adjoint_matrix: dict
    pseudo_hermiticity: dict
    eigenvalues: list
    phase: dict
    ground_energy: Optional[float]
    schema: int = SCHEMA

    def to_dict(self) -> dict:
        d = asdict(self)
        return {"schema": d.pop("schema"), **d}

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        fields = dict(d)
        fields.pop("schema")
        return cls(**fields)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))


def analyze(inst: Instance, tol: Optional[Tolerances] = None) -> AnalysisReport:
    """Build the full report for an instantiated model.

    Raises NumericalFailure from ``eigen`` unchanged.
    """
    tol = tol or Tolerances()
    H = inst.adjoint
    Hc = adjoint_matrix_via_commutators(inst.poly)
    rep = verify_pseudo_hermiticity(H, build_U(H.K), tol.structural)
    s = eigen(H, tol.residual)
    lab = classify(s, tol.reality, tol.ep)
    try:
        e0 = ground_energy(s, tol.reality, tol.ep)
    except PhaseError:
        e0 = None
    return AnalysisReport(
        model={
            "id": inst.model.id,
            "K": inst.model.K,
            "expression": inst.model.expression,
            "parameters": dict(inst.params),
        },
        gamma={
            "entries": cmatrix(inst.gamma.entries),
            "scalar_remainder": cpair(inst.gamma.scalar_remainder),
        },
        adjoint_matrix={"formula": cmatrix(H.entries), "commutator": cmatrix(Hc.entries)},
        pseudo_hermiticity={
            "residual_pseudo": rep.residual_pseudo,
            "residual_antireal": rep.residual_antireal,
            "tol": rep.tol,
            "passed": rep.passed,
        },
        eigenvalues=[
            {"value": cpair(v), "pseudo_norm": cpair(pn), "residual": float(r)}
            for v, pn, r in zip(s.values, s.pseudo_norms, s.residuals)
        ],
        phase={"label": lab.label, "max_im": lab.max_im, "min_pseudo_norm": lab.min_pseudo_norm},
        ground_energy=e0,
    )


# -- model and matrix files ----------------------------------------------------


def model_from_dict(d: dict) -> ModelSpec:
    missing = {"name", "K", "hamiltonian", "parameters"} - set(d)
    if missing:
        raise ValueError(f"model file lacks field(s) {sorted(missing)}")
    params = {str(k): float(v) for k, v in dict(d["parameters"]).items()}
    return ModelSpec(str(d["name"]), int(d["K"]), str(d["hamiltonian"]), params)


def load_model_file(path) -> ModelSpec:
    """Read a model JSON file and make sure it instantiates at its own parameters."""
    spec = model_from_dict(json.loads(Path(path).read_text()))
    build(spec)
    return spec


def model_to_dict(spec: ModelSpec) -> dict:
    return {"name": spec.id, "K": spec.K, "hamiltonian": spec.expression, "parameters": dict(spec.defaults)}


def load_matrix_file(path) -> AdjointMatrix:
    """Adjoint matrix from ``{"adjoint_matrix": [[[re, im], ...], ...]}``.

    An analysis report is accepted as well; its formula-route matrix is used.
    """
    d = json.loads(Path(path).read_text())
    m = d.get("adjoint_matrix")
    if isinstance(m, dict):
        m = m.get("formula")
    if m is None:
        raise ValueError(f"{path}: no adjoint_matrix entry")
    a = from_cmatrix(m)
    n = a.shape[0]
    if a.shape != (n, n) or n % 2:
        raise ValueError(f"{path}: adjoint matrix must be square with even size, got {a.shape}")
    K = int(d.get("K", d.get("model", {}).get("K", n // 2)))
    if 2 * K != n:
        raise ValueError(f"{path}: K={K} does not match a {n}x{n} matrix")
    return AdjointMatrix(K, a, "file")


def matrix_to_dict(H: AdjointMatrix) -> dict:
    return {"schema": SCHEMA, "K": H.K, "adjoint_matrix": cmatrix(H.entries)}

