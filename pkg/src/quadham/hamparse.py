"""
Text front end for quadratic Hamiltonians.

Grammar (operator products keep their written order)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INTEGER)?
    atom   := NUMBER | 'i' | IDENT | '(' expr ')'

Operator identifiers are ``x1..xK`` and ``p1..pK``; for K <= 4 the aliases
``x y z w`` and ``px py pz pw`` name modes 1..4, and for K = 1 a bare ``p``
is ``p1``.  Every other identifier is a real parameter looked up in the
bindings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    DegreeError,
    NonSymmetricError,
    ParseError,
    UnboundParameterError,
    UnknownIdentifierError,
    UnsupportedFormError,
)
from .opalg import (
    MAX_PUBLIC_DEGREE,
    OperatorPoly,
    basis_index,
    basis_symbols,
    multiply,
    p,
    symbol_commutator,
    x,
)

ALIASES = ("x", "y", "z", "w")
MAX_OPERATOR_POWER = 2
MAX_SCALAR_POWER = 9

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()−])"
    r")"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        val = m.group(kind)
        if val == "−":
            val = "-"
        toks.append((kind, val, start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


def operator_names(K: int) -> dict:
    """Identifier -> OpSymbol table for a basis of size K."""
    names = {}
    for m in range(1, K + 1):
        names[f"x{m}"] = x(m)
        names[f"p{m}"] = p(m)
    if K <= len(ALIASES):
        for m, a in enumerate(ALIASES[:K], start=1):
            names[a] = x(m)
            names["p" + a] = p(m)
    if K == 1:
        names["p"] = p(1)
    return names


_OPERATOR_LIKE = re.compile(r"^(?:[xp]\d+|[xyzwp]|p[xyzw])$")


class _Parser:
    def __init__(self, text, params, K):
        self.text = text
        self.toks = tokenize(text)
        self.k = 0
        self.K = K
        self.params = params
        self.ops = operator_names(K)
        clash = set(params) & set(self.ops)
        if clash:
            raise ParseError(f"parameter names collide with operators: {sorted(clash)}")
        if "i" in params:
            raise ParseError("'i' is reserved for the imaginary unit")

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, val):
        t = self.take()
        if t[1] != val:
            raise ParseError(f"expected {val!r}, found {t[1] or 'end of input'!r}", t[2], self.text)
        return t

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        out = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2], self.text)
        return out

    def expr(self):
        left = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self):
        left = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            right = self.unary()
            if op == "*":
                left = self._mul(left, right, pos)
            else:
                if not right.is_constant():
                    raise ParseError("division by an operator", pos, self.text)
                d = right.scalar()
                if d == 0:
                    raise ParseError("division by zero", pos, self.text)
                left = left / d
        return left

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        _, _, pos = self.take()
        kind, val, epos = self.take()
        if kind != "num" or not val.isdigit() or int(val) < 1:
            raise ParseError("exponent must be a positive integer", epos, self.text)
        n = int(val)
        cap = MAX_SCALAR_POWER if base.is_constant() else MAX_OPERATOR_POWER
        if n > cap and base.is_constant():
            raise ParseError(f"scalar exponent {n} exceeds cap {cap}", epos, self.text)
        if n > cap:
            raise DegreeError(f"operator exponent {n} exceeds cap {cap} (at position {epos})")
        out = base
        for _ in range(n - 1):
            out = self._mul(out, base, pos)
        return out

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return OperatorPoly.constant(self.K, float(val))
        if kind == "ident":
            if val == "i":
                return OperatorPoly.constant(self.K, 1j)
            if val in self.ops:
                return OperatorPoly.symbol(self.K, self.ops[val])
            if val in self.params:
                return OperatorPoly.constant(self.K, float(self.params[val]))
            if _OPERATOR_LIKE.match(val):
                raise UnknownIdentifierError(f"operator {val!r} not in basis of size K={self.K}", pos, self.text)
            raise UnboundParameterError(f"unbound parameter {val!r}", pos, self.text)
        if val == "(":
            out = self.expr()
            self.expect(")")
            return out
        raise ParseError(f"unexpected token {val or 'end of input'!r}", pos, self.text)

    def _mul(self, a, b, pos):
        try:
            return multiply(a, b, max_degree=MAX_PUBLIC_DEGREE)
        except DegreeError as exc:
            raise DegreeError(f"{exc} (at position {pos})") from None


def parse(src: str, params: Mapping[str, float] | None = None, K: int = 1) -> OperatorPoly:
    """Parse ``src`` into a normal-ordered polynomial of degree <= 2."""
    if K < 1:
        raise ValueError("K must be >= 1")
    return _Parser(src, dict(params or {}), K).parse()


@dataclass(frozen=True)
class GammaMatrix:
    """Weyl-symmetrized coefficient matrix of H = sum gamma_ij O_i O_j + c."""

    K: int
    entries: np.ndarray
    scalar_remainder: complex = 0j

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.entries), initial=0.0)))
        return (
            np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= tol * scale
            and abs(self.scalar_remainder.imag) <= tol * scale
        )

    def to_poly(self) -> OperatorPoly:
        """Rebuild sum gamma_ij O_i O_j + scalar_remainder in normal order."""
        syms = basis_symbols(self.K)
        out = OperatorPoly.constant(self.K, self.scalar_remainder)
        for i, a in enumerate(syms):
            for j, b in enumerate(syms):
                g = self.entries[i, j]
                if g != 0:
                    out = out + complex(g) * multiply(
                        OperatorPoly.symbol(self.K, a), OperatorPoly.symbol(self.K, b)
                    )
        return out


def extract_gamma(poly: OperatorPoly, permissive: bool = False, tol: float = 1e-10) -> GammaMatrix:
    """Weyl-symmetrized gamma and scalar remainder of a quadratic polynomial.

    A normal-ordered term ``c O_a O_b`` with a != b is split as
    ``c/2 (O_a O_b + O_b O_a) + c/2 [O_a, O_b]``; the first half fills
    gamma_ab and gamma_ba, the commutator goes to the scalar remainder.

    Raises
    ------
    UnsupportedFormError
        degree > 2 or any degree-1 term.
    NonSymmetricError
        gamma not Hermitian or complex remainder, unless ``permissive``.
    """
    if poly.degree > 2:
        raise UnsupportedFormError(f"degree {poly.degree} polynomial is not quadratic")
    if poly.homogeneous(1).terms:
        raise UnsupportedFormError("linear terms are not supported: " + str(poly.homogeneous(1)))
    K = poly.K
    g = np.zeros((2 * K, 2 * K), dtype=complex)
    rem = poly.scalar()
    for w, c in poly.terms.items():
        if len(w) != 2:
            continue
        a, b = w
        i, j = basis_index(a, K), basis_index(b, K)
        if i == j:
            g[i, i] += c
        else:
            g[i, j] += c / 2
            g[j, i] += c / 2
            rem += c / 2 * symbol_commutator(a, b)
    gamma = GammaMatrix(K, g, complex(rem))
    if not permissive and not gamma.is_hermitian(tol):
        raise NonSymmetricError(
            "Hamiltonian is not symmetric: gamma is not Hermitian or the scalar part is complex"
        )
    return gamma
