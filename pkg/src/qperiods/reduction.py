"""Griffiths-Dwork reduction, cohomology normal forms, E-derivatives and Picard-Fuchs ODEs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce as _fold
from math import gcd, lcm

import flint

from .errors import UnsupportedCase
from .forms import RationalForm
from .hypersurface import Hypersurface
from .linalg import nullspace
from .poly import MultiPoly
from .ratfunc import RationalFunction, rf

Exponent = tuple[int, ...]


class CohomologyDecomposition:
    """Coefficients of a class on the grade-valid standard monomials e Omega / f^m."""

    __slots__ = ("X", "coefficients")

    def __init__(self, X: Hypersurface, coefficients: dict[tuple[int, Exponent], RationalFunction]):
        self.X = X
        self.coefficients = {k: v for k, v in coefficients.items() if v}

    def coefficient(self, m: int, exp: Exponent) -> RationalFunction:
        return self.coefficients.get((m, tuple(exp)), RationalFunction())

    def vector(self) -> list[RationalFunction]:
        """Coefficients in the order of ``X.cohomology_basis``."""
        return [self.coefficient(m, e) for m, e in self.X.cohomology_basis]

    def is_zero(self) -> bool:
        return not self.coefficients

    def to_form(self) -> RationalForm:
        pieces: dict[int, MultiPoly] = {}
        for (m, e), c in self.coefficients.items():
            mono = MultiPoly.monomial(e, c, self.X.f.names)
            pieces[m] = pieces[m] + mono if m in pieces else mono
        return RationalForm(self.X, pieces, check=False)

    def __add__(self, other):
        out = dict(self.coefficients)
        for k, v in other.coefficients.items():
            out[k] = out[k] + v if k in out else v
        return CohomologyDecomposition(self.X, out)

    def __neg__(self):
        return CohomologyDecomposition(self.X, {k: -v for k, v in self.coefficients.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = rf(c)
        return CohomologyDecomposition(self.X, {k: v * c for k, v in self.coefficients.items()})

    def __eq__(self, other):
        return isinstance(other, CohomologyDecomposition) and self.coefficients == other.coefficients

    def labels(self) -> list[str]:
        names = self.X.f.names
        out = []
        for m, e in self.X.cohomology_basis:
            mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a) or "1"
            out.append(f"{mono}*Omega/f^{m}")
        return out

    def __repr__(self):
        parts = [f"{lab}: {c}" for lab, c in zip(self.labels(), self.vector())]
        return "CohomologyDecomposition(" + ", ".join(parts) + ")"


class Reducer:
    """Griffiths-Dwork reduction on a fixed smooth hypersurface.

    For each monomial z^c the Jacobian decomposition z^c = sum_j a_j f_j + r is
    computed once and stored as (r, sum_j d a_j / d z_j); then
    a_j f_j Omega/f^m == (1/(m-1)) (d a_j/d z_j) Omega/f^{m-1} modulo exact forms.
    """

    def __init__(self, X: Hypersurface):
        X.require_smooth()
        self.X = X
        self.gb = X.gb
        self._cache: dict[Exponent, tuple[dict, dict]] = {}

    def split_monomial(self, exp: Exponent) -> tuple[dict, dict]:
        hit = self._cache.get(exp)
        if hit is not None:
            return hit
        if any(a < 0 for a in exp):
            raise UnsupportedCase("form has a pole along z0 = 0 (pole at infinity); reduction is not defined")
        X = self.X
        mono = MultiPoly.monomial(exp, 1, X.f.names)
        r, cofs = self.gb.normal_form_with_cofactors(mono)
        div = X.zero()
        for j, a in enumerate(cofs):
            if a:
                div = div + a.diff(j)
        hit = (r.terms, div.terms)
        self._cache[exp] = hit
        return hit

    def split(self, q: MultiPoly) -> tuple[dict, dict]:
        """(remainder, divergence of cofactors) for a homogeneous polynomial."""
        rem: dict = {}
        div: dict = {}
        for e, c in q.terms.items():
            r, d = self.split_monomial(e)
            _axpy(rem, r, c)
            _axpy(div, d, c)
        return rem, div

    def r_gd(self, a: RationalForm) -> RationalForm:
        """One simultaneous reduction step on every piece of pole order >= 2."""
        X = self.X
        out: dict[int, dict] = {}
        for m, q in a.pieces.items():
            if m < 2:
                _axpy(out.setdefault(m, {}), q.terms, rf(1))
                continue
            rem, div = self.split(q)
            _axpy(out.setdefault(m, {}), rem, rf(1))
            if div:
                _axpy(out.setdefault(m - 1, {}), div, rf(Fraction(1, m - 1)))
        pieces = {m: MultiPoly(X.N, t, X.f.names, _clean=True) for m, t in out.items() if t}
        return RationalForm(X, pieces, check=False)

    def reduce(self, a: RationalForm) -> CohomologyDecomposition:
        """Normal form: the fixed point of repeated r_gd, computed in one downward sweep."""
        X = self.X
        if not a.pieces:
            return CohomologyDecomposition(X, {})
        work = {m: dict(q.terms) for m, q in a.pieces.items()}
        coeffs: dict = {}
        for m in range(max(work), 0, -1):
            terms = work.pop(m, None)
            if not terms:
                continue
            if m == 1:
                rem = terms
                div = {}
            else:
                q = MultiPoly(X.N, terms, X.f.names, _clean=True)
                rem, div = self.split(q)
            for e, c in rem.items():
                coeffs[(m, e)] = c
            if div:
                _axpy(work.setdefault(m - 1, {}), div, rf(Fraction(1, m - 1)))
        for m, terms in work.items():
            if terms:
                raise UnsupportedCase(f"form has a nonzero piece at pole order {m} <= 0")
        for (m, e) in coeffs:
            if not self.gb.is_standard(e):
                raise AssertionError("reduction left a non-standard monomial")  # pragma: no cover
        return CohomologyDecomposition(X, coeffs)


def _axpy(dst: dict, src: dict, c: RationalFunction):
    for e, v in src.items():
        nv = v * c
        w = dst.get(e)
        if w is None:
            dst[e] = nv
        else:
            nv = w + nv
            if nv:
                dst[e] = nv
            else:
                del dst[e]


def reducer_for(X: Hypersurface) -> Reducer:
    red = X.__dict__.get("_reducer")
    if red is None:
        red = Reducer(X)
        X.__dict__["_reducer"] = red
    return red


def r_gd(a: RationalForm) -> RationalForm:
    return reducer_for(a.X).r_gd(a)


def reduce_to_normal_form(a: RationalForm) -> CohomologyDecomposition:
    return reducer_for(a.X).reduce(a)


def d_dE(a: RationalForm, k: int = 1) -> RationalForm:
    """k-th derivative in E, using df/dE = -z0^D."""
    X = a.X
    z0D = MultiPoly.monomial((X.D,) + (0,) * (X.N - 1), 1, X.f.names)
    for _ in range(k):
        pieces: dict[int, MultiPoly] = {}
        for m, q in a.pieces.items():
            dq = q.diff_E()
            if dq:
                pieces[m] = pieces[m] + dq if m in pieces else dq
            if m != 0:
                up = (q * z0D).scale(m)
                pieces[m + 1] = pieces[m + 1] + up if m + 1 in pieces else up
        a = RationalForm(X, pieces, check=False)
    return a


@dataclass(frozen=True)
class PicardFuchsODE:
    """sum_k c_k(E) (d/dE)^k applied to the period vanishes; ``coefficients`` is c_0..c_rho."""

    coefficients: tuple[RationalFunction, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def highest_first(self) -> tuple[RationalFunction, ...]:
        return tuple(reversed(self.coefficients))

    def apply(self, vectors: list[list[RationalFunction]]) -> list[RationalFunction]:
        """sum_k c_k v_k for derivative vectors v_0..v_rho."""
        out = [RationalFunction() for _ in vectors[0]]
        for c, v in zip(self.coefficients, vectors):
            out = [a + c * b for a, b in zip(out, v)]
        return out

    def __str__(self):
        parts = []
        for k in range(self.order, -1, -1):
            c = self.coefficients[k]
            if not c:
                continue
            d = "" if k == 0 else ("*d/dE" if k == 1 else f"*(d/dE)^{k}")
            parts.append(f"({c}){d}")
        return " + ".join(parts) if parts else "0"


def normalize_ode(coeffs: list[RationalFunction]) -> tuple[RationalFunction, ...]:
    """Clear denominators, remove polynomial and integer content, make lead(c_rho) > 0."""
    coeffs = [rf(c) for c in coeffs]
    dens = [c.den for c in coeffs if c]
    L = _fold(lambda a, b: a * b // a.gcd(b), dens, flint.fmpq_poly([1]))
    polys = [c.num * (L // c.den) if c else flint.fmpq_poly([]) for c in coeffs]
    G = _fold(lambda a, b: a.gcd(b), [p for p in polys if p != 0])
    polys = [p // G for p in polys]
    rat = [Fraction(int(x.p), int(x.q)) for p in polys for x in p.coeffs()]
    scale = _fold(lcm, (x.denominator for x in rat), 1)
    content = _fold(gcd, (int(x * scale) for x in rat), 0) or 1
    factor = flint.fmpq(scale, content)
    polys = [p * factor for p in polys]
    top = next(p for p in reversed(polys) if p != 0)
    if top.coeffs()[-1] < 0:
        polys = [-p for p in polys]
    return tuple(RationalFunction(p) for p in polys)


def derivative_classes(a: RationalForm, count: int) -> list[CohomologyDecomposition]:
    """Normal forms of a, d/dE a, ..., (d/dE)^(count-1) a.

    Differentiation in E commutes with adding exact forms, so each derivative
    is taken from the previous normal form rather than from the raw form.
    """
    red = reducer_for(a.X)
    out = []
    cur = red.reduce(a)
    out.append(cur)
    for _ in range(count - 1):
        cur = red.reduce(d_dE(cur.to_form()))
        out.append(cur)
    return out


def picard_fuchs(a: RationalForm, rho_max: int | None = None) -> PicardFuchsODE:
    """Minimal-order linear ODE in E satisfied by the periods of ``a``."""
    X = a.X
    if rho_max is None:
        rho_max = X.d
    classes = derivative_classes(a, rho_max + 1)
    vecs = [c.vector() for c in classes]
    nb = len(X.cohomology_basis)
    for rho in range(rho_max + 1):
        rows = [[vecs[k][i] for k in range(rho + 1)] for i in range(nb)]
        kernel = nullspace(rows, rho + 1)
        if kernel:
            ode = PicardFuchsODE(normalize_ode(kernel[0]))
            if any(ode.apply(vecs[: rho + 1])):
                raise AssertionError("Picard-Fuchs relation failed verification")  # pragma: no cover
            return ode
    raise RuntimeError(f"no Picard-Fuchs relation of order <= {rho_max} found")
