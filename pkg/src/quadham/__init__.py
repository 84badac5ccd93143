"""Adjoint-matrix analysis of symmetric quadratic Hamiltonians.

The usual entry points::

    from quadham import build, eigen, classify
    inst = build("toy1d", {"alpha": 1.0, "beta": 3.0})
    classify(eigen(inst.adjoint)).label      # 'Broken'
"""

__version__ = "0.1.0"

from .adjrep import AdjointMatrix, adjoint_matrix, adjoint_matrix_via_commutators, build_U, verify_pseudo_hermiticity
from .catalog import CATALOG, build, closed_form_roots, get_model, instantiate
from .errors import QuadHamError
from .hamparse import extract_gamma, parse
from .opalg import OperatorPoly, commutator, p, x
from .spectra import BROKEN, EXCEPTIONAL, REAL, classify, eigen, ground_energy, pair_spectrum
