"""Graded polynomials q = sum_m q_m and rational forms sum_m q_m Omega / f^m."""

from __future__ import annotations

from collections.abc import Mapping

from .errors import GradeError
from .groebner import GroebnerBasis, _Tracked
from .hypersurface import Hypersurface
from .poly import MultiPoly
from .ratfunc import rf


def _clean_pieces(pieces: Mapping[int, MultiPoly]) -> dict[int, MultiPoly]:
    return {m: p for m, p in pieces.items() if p}


def _add_pieces(a: Mapping[int, MultiPoly], b: Mapping[int, MultiPoly]) -> dict[int, MultiPoly]:
    out = dict(a)
    for m, p in b.items():
        out[m] = out[m] + p if m in out else p
    return _clean_pieces(out)


class GradedPolynomial:
    """A finite sum of pieces q_m in F_m (degree m*D - 2n - 1)."""

    __slots__ = ("X", "pieces")

    def __init__(self, X: Hypersurface, pieces: Mapping[int, MultiPoly] | None = None, *, check: bool = True):
        self.X = X
        self.pieces = _clean_pieces(pieces or {})
        if check:
            for m, p in self.pieces.items():
                _check_piece(X, m, p)

    @classmethod
    def from_polynomial(cls, X: Hypersurface, q: MultiPoly) -> GradedPolynomial:
        """Split a polynomial into homogeneous parts and assign each its grade."""
        parts: dict[int, dict] = {}
        for e, c in q.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        pieces = {}
        for deg, terms in parts.items():
            m = X.grade_of_degree(deg)
            pieces[m] = MultiPoly(q.nvars, terms, q.names, _clean=True)
        return cls(X, pieces)

    def __add__(self, other: GradedPolynomial):
        return GradedPolynomial(self.X, _add_pieces(self.pieces, other.pieces), check=False)

    def __neg__(self):
        return GradedPolynomial(self.X, {m: -p for m, p in self.pieces.items()}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return GradedPolynomial(self.X, {m: p.scale(c) for m, p in self.pieces.items()}, check=False)

    def total(self) -> MultiPoly:
        out = self.X.zero()
        for p in self.pieces.values():
            out = out + p
        return out

    def is_zero(self) -> bool:
        return not self.pieces

    def __eq__(self, other):
        return isinstance(other, GradedPolynomial) and self.pieces == other.pieces

    def __repr__(self):
        body = ", ".join(f"{m}: {p}" for m, p in sorted(self.pieces.items()))
        return f"GradedPolynomial({{{body}}})"


class RationalForm:
    """sum_m q_m Omega / f^m on the complement of the hypersurface.

    Equality compares canonical representatives (see ``phi``), so two
    numerically equal rational forms written with different pole splittings
    compare equal.
    """

    __slots__ = ("X", "pieces")

    def __init__(self, X: Hypersurface, pieces: Mapping[int, MultiPoly] | None = None, *, check: bool = True):
        self.X = X
        self.pieces = _clean_pieces(pieces or {})
        if check:
            for m, p in self.pieces.items():
                _check_piece(X, m, p, allow_low=True)

    @classmethod
    def omega_over_f(cls, X: Hypersurface, numerator: MultiPoly | None = None, m: int = 1) -> RationalForm:
        return cls(X, {m: numerator if numerator is not None else X.one()})

    def __add__(self, other: RationalForm):
        return RationalForm(self.X, _add_pieces(self.pieces, other.pieces), check=False)

    def __neg__(self):
        return RationalForm(self.X, {m: -p for m, p in self.pieces.items()}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = rf(c)
        return RationalForm(self.X, {m: p.scale(c) for m, p in self.pieces.items()}, check=False)

    def is_zero(self) -> bool:
        return not phi(self).pieces

    def max_pole(self) -> int:
        return max(self.pieces) if self.pieces else 0

    def canonical(self) -> RationalForm:
        return psi(phi(self))

    def __eq__(self, other):
        if not isinstance(other, RationalForm):
            return NotImplemented
        return phi(self - other).pieces == {}

    def __hash__(self):  # pragma: no cover - forms are not meant as dict keys
        raise TypeError("RationalForm is unhashable")

    def __repr__(self):
        body = " + ".join(f"({p})*Omega/f^{m}" for m, p in sorted(self.pieces.items()))
        return f"RationalForm({body or '0'})"


def _check_piece(X: Hypersurface, m: int, p: MultiPoly, allow_low: bool = False):
    if p.nvars != X.N:
        raise GradeError(f"piece has {p.nvars} variables, expected {X.N}")
    want = X.piece_degree(m)
    if not p.is_homogeneous() or p.total_degree() != want:
        raise GradeError(f"piece at pole order {m} must be homogeneous of degree {want}")
    if not allow_low and m < X.min_grade():
        raise GradeError(f"pole order {m} is below the minimal grade {X.min_grade()}")


def psi(q: GradedPolynomial) -> RationalForm:
    """psi(q) = sum_m q_m Omega / f^m."""
    return RationalForm(q.X, q.pieces, check=False)


def _f_divider(X: Hypersurface) -> GroebnerBasis:
    cache = X.__dict__.get("_f_divider")
    if cache is None:
        t = _Tracked(X.f, [MultiPoly.constant(X.N, 1, X.f.names)])
        cache = GroebnerBasis([X.f], X.order, [t])
        X.__dict__["_f_divider"] = cache
    return cache


def phi(a: RationalForm) -> GradedPolynomial:
    """Canonical section of psi.

    Sweeping from the highest pole order down, each piece is divided by f; the
    remainder stays and the quotient is carried to the next lower pole order.
    """
    X = a.X
    if not a.pieces:
        return GradedPolynomial(X, {}, check=False)
    div = _f_divider(X)
    out = {}
    carry = None
    m = max(a.pieces)
    lowest = min(a.pieces)
    while m >= lowest or carry is not None:
        p = a.pieces.get(m)
        if carry is not None:
            p = carry if p is None else p + carry
        carry = None
        if p:
            rem, quots = div._reduce_terms(p.terms, True)
            if rem:
                out[m] = MultiPoly(X.N, rem, X.f.names, _clean=True)
            if quots[0]:
                carry = MultiPoly(X.N, quots[0], X.f.names, _clean=True)
        m -= 1
    return GradedPolynomial(X, out, check=False)
