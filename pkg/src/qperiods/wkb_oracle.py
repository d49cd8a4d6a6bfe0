"""Independent check of the trace series through the one-dimensional WKB recursion.

For H = p^2/2 + V(x) the action density phi solves phi^2 = 2(E - V) + i hbar phi'.
Writing s = sqrt(E - V) and phi_r = sqrt(2) (i/sqrt(2))^r chi_r, the chi_r are
real and satisfy

    chi_0 = s,   chi_r = (chi_{r-1}' - sum_{0<j<r} chi_j chi_{r-j}) / (2 s).

chi_r is stored as a finite sum  sum_j a_j(x) s^j  with a_j polynomial in x over Q(E).
The scalar sqrt(2) (i/sqrt(2))^r is kept exactly as a ``PhaseScalar``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import QPeriodsError
from .hypersurface import Hypersurface
from .poly import MultiPoly, affine_names
from .ratfunc import RationalFunction, rf
from .reduction import CohomologyDecomposition, reducer_for
from .trace_series import AffineForm


@dataclass(frozen=True)
class PhaseScalar:
    """c * sqrt(2)^e * i^k with c rational, e in {0, 1}, k in {0, 1, 2, 3}."""

    c: Fraction
    e: int = 0
    k: int = 0

    @classmethod
    def make(cls, c, e=0, k=0):
        c = Fraction(c)
        c *= 2 ** (e // 2)
        e %= 2
        k %= 4
        if k >= 2:
            c, k = -c, k - 2
        return cls(c, e, k)

    def __mul__(self, other: PhaseScalar):
        return PhaseScalar.make(self.c * other.c, self.e + other.e, self.k + other.k)

    def is_real(self) -> bool:
        return self.k == 0

    def is_rational(self) -> bool:
        return self.k == 0 and self.e == 0

    def __str__(self):
        out = str(self.c)
        if self.e:
            out += "*sqrt(2)"
        if self.k:
            out += "*i"
        return out


def phi_scalar(r: int) -> PhaseScalar:
    """sqrt(2) (i/sqrt(2))^r."""
    # (1/sqrt 2)^r = 2^(-r) sqrt(2)^r
    return PhaseScalar.make(Fraction(1, 2 ** r), 1 + r, r)


class SExpr:
    """sum_j a_j s^j, s = sqrt(E - V); a_j polynomials in (x1, p1) free of p1."""

    def __init__(self, V: MultiPoly, terms: dict | None = None):
        self.V = V
        self.terms = {j: a for j, a in (terms or {}).items() if a}

    def _new(self, terms):
        return SExpr(self.V, terms)

    @property
    def u(self) -> MultiPoly:
        return MultiPoly.constant(self.V.nvars, RationalFunction.E(), self.V.names) - self.V

    def __add__(self, other: SExpr):
        out = dict(self.terms)
        for j, a in other.terms.items():
            out[j] = out[j] + a if j in out else a
        return self._new(out)

    def __neg__(self):
        return self._new({j: -a for j, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, SExpr):
            return self._new({j: a.scale(other) for j, a in self.terms.items()})
        out: dict = {}
        for j1, a1 in self.terms.items():
            for j2, a2 in other.terms.items():
                j = j1 + j2
                v = a1 * a2
                out[j] = out[j] + v if j in out else v
        return self._new(out)

    def shift(self, k: int) -> SExpr:
        """Multiply by s^k."""
        return self._new({j + k: a for j, a in self.terms.items()})

    def dx(self) -> SExpr:
        Vx = self.V.diff(0)
        out: dict = {}
        for j, a in self.terms.items():
            da = a.diff(0)
            if da:
                out[j] = out[j] + da if j in out else da
            t = (a * Vx).scale(Fraction(-j, 2))
            if t:
                out[j - 2] = out[j - 2] + t if j - 2 in out else t
        return self._new(out)

    def dE(self) -> SExpr:
        out: dict = {}
        for j, a in self.terms.items():
            da = a.diff_E()
            if da:
                out[j] = out[j] + da if j in out else da
            t = a.scale(Fraction(j, 2))
            if t:
                out[j - 2] = out[j - 2] + t if j - 2 in out else t
        return self._new(out)

    def canonical(self) -> tuple[MultiPoly, MultiPoly, int]:
        """(A, B, low) with self = s^low (A + B s) and low even; unique for a given low."""
        if not self.terms:
            z = MultiPoly.zero(self.V.nvars, self.V.names)
            return z, z, 0
        low = min(self.terms)
        low -= low % 2
        A = MultiPoly.zero(self.V.nvars, self.V.names)
        B = A
        u = self.u
        for j, a in self.terms.items():
            rel = j - low
            t = a * (u ** (rel // 2))
            if rel % 2:
                B = B + t
            else:
                A = A + t
        return A, B, low

    def is_zero(self) -> bool:
        A, B, _ = self.canonical()
        return not A and not B

    def odd_part_only(self) -> bool:
        return all(j % 2 for j in self.terms)

    def even_part_only(self) -> bool:
        return all(j % 2 == 0 for j in self.terms)

    def half_odd_poles(self) -> dict[int, MultiPoly]:
        """Rewrite as sum_m w_m / s^(2m-1), m >= 1 (only for odd powers of s)."""
        out: dict = {}
        u = self.u
        for j, a in self.terms.items():
            if j % 2 == 0:
                raise QPeriodsError("integer-pole term has no residue lift")
            if j < 0:
                m = (1 - j) // 2
                w = a
            else:
                m = 1
                w = a * (u ** ((j + 1) // 2))
            out[m] = out[m] + w if m in out else w
        return {m: w for m, w in out.items() if w}

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({a})*s^{j}" for j, a in sorted(self.terms.items()))


class WKBSeries:
    """The chi_r of a potential V(x1), computed lazily."""

    def __init__(self, V: MultiPoly):
        if V.nvars != 2:
            V = MultiPoly(2, {(e[0], 0): c for e, c in V.terms.items()}, affine_names(1), _clean=True)
        if any(e[1] for e in V.terms):
            raise ValueError("the potential must not depend on p1")
        self.V = V
        self.H = V + MultiPoly.monomial((0, 2), Fraction(1, 2), V.names)
        self.chi = [SExpr(V, {1: MultiPoly.constant(2, 1, V.names)})]

    def chi_r(self, r: int) -> SExpr:
        while len(self.chi) <= r:
            k = len(self.chi)
            acc = self.chi[k - 1].dx()
            for j in range(1, k):
                acc = acc - self.chi[j] * self.chi[k - j]
            self.chi.append((acc * Fraction(1, 2)).shift(-1))
        return self.chi[r]

    def phi(self, r: int) -> tuple[PhaseScalar, SExpr]:
        return phi_scalar(r), self.chi_r(r)

    def dphi_dE(self, r: int) -> tuple[PhaseScalar, SExpr]:
        return phi_scalar(r), self.chi_r(r).dE()

    def riccati_residual(self, r: int) -> dict:
        """[hbar^r] of phi^2 - 2(E - V) - i hbar phi', grouped by phase; every value must vanish."""
        groups: dict = {}

        def add(scalar: PhaseScalar, expr: SExpr):
            key = (scalar.e, scalar.k)
            expr = expr * scalar.c
            groups[key] = groups[key] + expr if key in groups else expr

        for j in range(r + 1):
            sj, cj = self.phi(j)
            sk, _ = self.phi(r - j)
            add(sj * sk, cj * self.chi_r(r - j))
        if r == 0:
            add(PhaseScalar.make(-2), SExpr(self.V, {0: self.chi[0].u}))
        else:
            s, c = self.phi(r - 1)
            add(PhaseScalar.make(-1, 0, 1) * s, c.dx())
        return groups

    def riccati_ok(self, r_max: int) -> bool:
        return all(e.is_zero() for r in range(r_max + 1) for e in self.riccati_residual(r).values())


def lift_scalar(m: int) -> PhaseScalar:
    """w dx / s^(2m-1) = sqrt(2) (m-1)! Gamma(3/2-m)/Gamma(1/2) res(w dx dp/(H-E)^m)."""
    rho = Fraction(1)
    for l in range(1, m):
        rho /= Fraction(1, 2) - l
    return PhaseScalar.make(factorial(m - 1) * rho, 1, 0)


def residue_lift(scalar: PhaseScalar, expr: SExpr, H: MultiPoly) -> tuple[PhaseScalar, AffineForm]:
    """Lift scalar * expr (half-odd poles) to (common phase, sum_m a_m dx dp/(H-E)^m).

    The returned phase multiplies the rational affine form.
    """
    pieces = expr.half_odd_poles()
    if not pieces:
        return PhaseScalar.make(0), AffineForm(H)
    phase = None
    out = {}
    for m, w in pieces.items():
        sc = scalar * lift_scalar(m)
        if phase is None:
            phase = PhaseScalar.make(1, sc.e, sc.k)
        if (sc.e, sc.k) != (phase.e, phase.k):
            raise QPeriodsError("mixed phases in one WKB order")  # pragma: no cover
        out[m] = w.scale(sc.c)
    return phase, AffineForm(H, out)


def oracle_form(V: MultiPoly, k: int) -> tuple[PhaseScalar, AffineForm]:
    """[hbar^k] d phi/dE lifted to an affine rational form (with its phase)."""
    W = WKBSeries(V)
    if k % 2:
        return PhaseScalar.make(0), AffineForm(W.H)
    sc, expr = W.dphi_dE(k)
    return residue_lift(sc, expr, W.H)


def oracle_coefficient(V: MultiPoly, k: int, X: Hypersurface | None = None) -> CohomologyDecomposition:
    """Griffiths-Dwork normal form of the lifted [hbar^k] d phi/dE (odd k give zero)."""
    W = WKBSeries(V)
    X = X or Hypersurface.from_hamiltonian(W.H)
    X.require_smooth()
    if k % 2:
        return CohomologyDecomposition(X, {})
    phase, form = oracle_form(V, k)
    if not phase.is_rational():
        raise QPeriodsError(f"unexpected phase {phase} at even order")  # pragma: no cover
    return reducer_for(X).reduce(form.homogenize(X)).scale(phase.c)


def potential_of(H: MultiPoly) -> MultiPoly:
    """V for H = p1^2/2 + V(x1); raises ValueError for other shapes."""
    if H.nvars != 2:
        raise ValueError("the WKB oracle is one-dimensional")
    kin = {e: c for e, c in H.terms.items() if e[1]}
    if kin != {(0, 2): rf(Fraction(1, 2))}:
        raise ValueError("the WKB oracle needs H = p1^2/2 + V(x1)")
    return MultiPoly(2, {e: c for e, c in H.terms.items() if not e[1]}, H.names, _clean=True)
