"""
Polynomials in the canonical operators x_1..x_K, p_1..p_K.

The only relation used is [x_m, p_n] = i delta_mn (hbar = 1); positions
commute among themselves and so do momenta.  Every polynomial is kept in
normal order: positions before momenta, indices ascending within each group.
With that convention the normal form of a word is its sorted form plus the
lower-degree corrections produced by the x/p swaps, so polynomial equality is
a plain comparison of coefficient maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

from .errors import DegreeError, DimensionError

POSITION = 0
MOMENTUM = 1

MAX_WORD = 4
MAX_PUBLIC_DEGREE = 2


class OpSymbol(NamedTuple):
    """A single canonical operator; tuple order is the normal-order key."""

    kind: int
    index: int

    def __str__(self):
        return ("x" if self.kind == POSITION else "p") + str(self.index)


Word = tuple  # tuple[OpSymbol, ...]


def x(index: int) -> OpSymbol:
    return OpSymbol(POSITION, index)


def p(index: int) -> OpSymbol:
    return OpSymbol(MOMENTUM, index)


def basis_symbols(K: int) -> list[OpSymbol]:
    """Basis (x_1..x_K, p_1..p_K), the ordering of every matrix in quadham."""
    return [x(m) for m in range(1, K + 1)] + [p(m) for m in range(1, K + 1)]


def basis_index(sym: OpSymbol, K: int) -> int:
    return sym.index - 1 + (K if sym.kind == MOMENTUM else 0)


def symbol_commutator(a: OpSymbol, b: OpSymbol) -> complex:
    """[a, b] as a scalar."""
    if a.index != b.index or a.kind == b.kind:
        return 0j
    return 1j if a.kind == POSITION else -1j


@lru_cache(maxsize=None)
def _reduce(word: Word) -> tuple:
    # Normal form of a bare word as ((word, coeff), ...); coefficients are
    # products of +-i so caching on the word alone is exact.
    for k in range(len(word) - 1):
        a, b = word[k], word[k + 1]
        if a > b:
            swapped = word[:k] + (b, a) + word[k + 2:]
            out = dict(_reduce(swapped))
            # a b = b a + [a, b]
            c = symbol_commutator(a, b)
            if c:
                for w, v in _reduce(word[:k] + word[k + 2:]):
                    out[w] = out.get(w, 0) + c * v
            return tuple((w, v) for w, v in out.items() if v != 0)
    return ((word, 1 + 0j),)


def _infer_K(words: Iterable[Word]) -> int:
    return max((s.index for w in words for s in w), default=1)


def normal_order(word, coeff: complex = 1.0, K: int | None = None) -> "OperatorPoly":
    """Rewrite ``coeff * word`` in normal order.

    >>> str(normal_order((p(1), x(1))))
    'x1*p1 - 1j'
    """
    word = tuple(OpSymbol(*s) for s in word)
    if len(word) > MAX_WORD:
        raise DegreeError(f"word of length {len(word)} exceeds supported length {MAX_WORD}")
    if K is None:
        K = _infer_K([word])
    for s in word:
        if not 1 <= s.index <= K:
            raise DimensionError(f"symbol {s} outside basis of size K={K}")
    terms = {w: complex(coeff) * v for w, v in _reduce(word)}
    return OperatorPoly(K, terms)


@dataclass(frozen=True)
class OperatorPoly:
    """Complex polynomial in x_1..x_K, p_1..p_K stored in normal order.

    ``terms`` maps normal-form words (tuples of :class:`OpSymbol`) to nonzero
    complex coefficients.  The empty word is the identity operator.  Instances
    are treated as immutable; arithmetic returns new objects.
    """

    K: int
    terms: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.K < 1:
            raise DimensionError("K must be >= 1")
        clean = {tuple(w): complex(c) for w, c in self.terms.items() if c != 0}
        object.__setattr__(self, "terms", clean)

    # constructors -----------------------------------------------------

    @classmethod
    def constant(cls, K: int, value: complex) -> "OperatorPoly":
        return cls(K, {(): value})

    @classmethod
    def symbol(cls, K: int, sym: OpSymbol, coeff: complex = 1.0) -> "OperatorPoly":
        return normal_order((sym,), coeff, K)

    @classmethod
    def linear(cls, K: int, coeffs) -> "OperatorPoly":
        """sum_i coeffs[i] O_i over the basis (x_1..x_K, p_1..p_K)."""
        syms = basis_symbols(K)
        if len(coeffs) != len(syms):
            raise DimensionError(f"expected {len(syms)} coefficients, got {len(coeffs)}")
        return cls(K, {(s,): complex(c) for s, c in zip(syms, coeffs)})

    # inspection --------------------------------------------------------

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def coeff(self, word) -> complex:
        return self.terms.get(tuple(word), 0j)

    def homogeneous(self, degree: int) -> "OperatorPoly":
        return OperatorPoly(self.K, {w: c for w, c in self.terms.items() if len(w) == degree})

    def is_constant(self) -> bool:
        return self.degree == 0

    def scalar(self) -> complex:
        return self.terms.get((), 0j)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def approx_equal(self, other: "OperatorPoly", tol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= tol

    # arithmetic --------------------------------------------------------

    def _check(self, other):
        if self.K != other.K:
            raise DimensionError(f"basis sizes differ: K={self.K} vs K={other.K}")

    def __add__(self, other):
        if not isinstance(other, OperatorPoly):
            other = OperatorPoly.constant(self.K, other)
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return OperatorPoly(self.K, out)

    __radd__ = __add__

    def __neg__(self):
        return OperatorPoly(self.K, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, OperatorPoly):
            return multiply(self, other)
        return OperatorPoly(self.K, {w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        # scalar * poly; poly * poly always goes through __mul__
        return OperatorPoly(self.K, {w: other * c for w, c in self.terms.items()})

    def __truediv__(self, other):
        return self * (1.0 / other)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (-len(w), w)):
            c = self.terms[w]
            cs = _fmt_coeff(c)
            if not w:
                parts.append(cs)
            elif cs == "1":
                parts.append("*".join(map(str, w)))
            elif cs == "-1":
                parts.append("-" + "*".join(map(str, w)))
            else:
                parts.append(cs + "*" + "*".join(map(str, w)))
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0:
        v = c.real
        return str(int(v)) if v == int(v) else repr(v)
    if c.real == 0:
        v = c.imag
        return (str(int(v)) if v == int(v) else repr(v)) + "j"
    return f"({c.real!r}{c.imag:+}j)"


def multiply(a: OperatorPoly, b: OperatorPoly, max_degree: int = MAX_WORD) -> OperatorPoly:
    """Operator product ``a b`` in normal order.

    Words up to length 4 are formed transiently; the result is rejected when
    its normal-ordered degree exceeds ``max_degree``.
    """
    a._check(b)
    out: dict = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            w = wa + wb
            if len(w) > MAX_WORD:
                raise DegreeError(f"product word of length {len(w)} exceeds {MAX_WORD}")
            c = ca * cb
            for wr, v in _reduce(w):
                out[wr] = out.get(wr, 0) + c * v
    res = OperatorPoly(a.K, out)
    if res.degree > max_degree:
        raise DegreeError(f"product has degree {res.degree} > {max_degree}")
    return res


def _require_public(*polys):
    for q in polys:
        if q.degree > MAX_PUBLIC_DEGREE:
            raise DegreeError(f"degree {q.degree} polynomial; at most {MAX_PUBLIC_DEGREE} supported")


def commutator(a: OperatorPoly, b: OperatorPoly) -> OperatorPoly:
    """[a, b] = ab - ba in normal order."""
    a._check(b)
    _require_public(a, b)
    out: dict = {}
    for wa, ca in a.terms.items():
        if not wa:
            continue
        for wb, cb in b.terms.items():
            if not wb:
                continue
            c = ca * cb
            for wr, v in _reduce(wa + wb):
                out[wr] = out.get(wr, 0) + c * v
            for wr, v in _reduce(wb + wa):
                out[wr] = out.get(wr, 0) - c * v
    return OperatorPoly(a.K, out)


def adjoint(a: OperatorPoly) -> OperatorPoly:
    """Reverse every word and conjugate its coefficient (x, p are self-adjoint)."""
    _require_public(a)
    out: dict = {}
    for w, c in a.terms.items():
        cc = c.conjugate()
        for wr, v in _reduce(tuple(reversed(w))):
            out[wr] = out.get(wr, 0) + cc * v
    return OperatorPoly(a.K, out)


def is_symmetric(a: OperatorPoly, tol: float = 1e-12) -> bool:
    return (adjoint(a) - a).max_abs() <= tol
