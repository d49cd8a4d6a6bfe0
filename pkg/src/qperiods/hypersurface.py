"""The projective hypersurface f = 0 attached to a Hamiltonian, with cached Jacobian data."""

from __future__ import annotations

from functools import cached_property

from .errors import GradeError, SingularHypersurface
from .groebner import (
    GroebnerBasis,
    MonomialOrder,
    QuotientBasis,
    buchberger,
    jacobian,
    quotient_basis,
)
from .poly import MultiPoly, homogenize


class Hypersurface:
    """Homogeneous f in z0..z_{2n}, degree D, with its Jacobian ideal.

    The Groebner basis and quotient basis are computed lazily; a singular f
    raises SingularHypersurface the first time they are needed.
    """

    def __init__(self, f: MultiPoly, order: MonomialOrder | None = None, H: MultiPoly | None = None):
        if not f or not f.is_homogeneous():
            raise ValueError("f must be a nonzero homogeneous polynomial")
        if f.nvars % 2 != 1:
            raise ValueError("f must have an odd number 2n+1 of variables")
        self.f = f
        self.N = f.nvars
        self.n = (f.nvars - 1) // 2
        self.D = f.total_degree()
        self.order = order or MonomialOrder(self.N)
        self.H = H
        self.partials = jacobian(f)

    @classmethod
    def from_hamiltonian(cls, H: MultiPoly, order: MonomialOrder | None = None) -> Hypersurface:
        return cls(homogenize(H), order, H)

    # -- Jacobian data ------------------------------------------------------
    @cached_property
    def gb(self) -> GroebnerBasis:
        gens = self.partials
        if not any(gens):
            raise SingularHypersurface("all partial derivatives of f vanish")
        return buchberger(gens, self.order)

    @cached_property
    def basis(self) -> QuotientBasis:
        return quotient_basis(self.gb)

    @property
    def d(self) -> int:
        return self.basis.d

    def is_smooth(self) -> bool:
        try:
            _ = self.basis
        except SingularHypersurface:
            return False
        return True

    def require_smooth(self):
        _ = self.basis  # raises SingularHypersurface

    @property
    def pole_bound(self) -> int:
        """r = floor(((D-1)(2n+1)+1)/D)."""
        return ((self.D - 1) * self.N + 1) // self.D

    # -- grading ------------------------------------------------------------
    def piece_degree(self, m: int) -> int:
        return m * self.D - self.N

    def grade_of_degree(self, deg: int) -> int:
        m, rem = divmod(deg + self.N, self.D)
        if rem:
            raise GradeError(f"degree {deg} is not of the form m*{self.D} - {self.N}")
        return m

    def grade_of(self, q: MultiPoly) -> int:
        if not q:
            raise GradeError("the zero polynomial has no grade")
        if not q.is_homogeneous():
            raise GradeError("grade_of expects a homogeneous polynomial")
        return self.grade_of_degree(q.total_degree())

    def min_grade(self) -> int:
        return -(-self.N // self.D)

    @cached_property
    def cohomology_basis(self) -> tuple[tuple[int, tuple], ...]:
        """Grade-valid standard monomials as (m, exponent) pairs, in basis order."""
        out = []
        for e in self.basis.monomials:
            deg = sum(e)
            if (deg + self.N) % self.D == 0:
                out.append(((deg + self.N) // self.D, e))
        return tuple(out)

    def var(self, i: int) -> MultiPoly:
        return MultiPoly.var(self.N, i, self.f.names)

    def one(self) -> MultiPoly:
        return MultiPoly.constant(self.N, 1, self.f.names)

    def zero(self) -> MultiPoly:
        return MultiPoly.zero(self.N, self.f.names)

    def __repr__(self):
        return f"Hypersurface(f = {self.f})"
