"""Sparse multivariate polynomials over Q(E).

Exponent vectors are plain tuples.  Negative exponents are tolerated so that a
few Laurent monomials (poles at infinity) can be represented and detected; all
algebraic code paths assume non-negative exponents unless stated otherwise.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from fractions import Fraction

from .ratfunc import ONE, RationalFunction, rf

Exponent = tuple[int, ...]


def homogeneous_names(nvars: int) -> list[str]:
    return [f"z{i}" for i in range(nvars)]


def affine_names(n: int) -> list[str]:
    # affine slot 2i-2 is x_i and 2i-1 is p_i, mirroring z_{2i-1}, z_{2i}
    names = []
    for i in range(1, n + 1):
        names += [f"x{i}", f"p{i}"]
    return names


class MultiPoly:
    """Immutable sparse polynomial: a map exponent tuple -> RationalFunction."""

    __slots__ = ("_hash", "names", "nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, RationalFunction] | None = None,
                 names: list[str] | None = None, *, _clean: bool = False):
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = dict(terms)
        else:
            clean = {}
            for e, c in terms.items():
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                c = rf(c)
                if c:
                    clean[tuple(e)] = c
            self.terms = clean
        self.names = names if names is not None else homogeneous_names(nvars)
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, names=None) -> MultiPoly:
        return cls(nvars, {}, names, _clean=True)

    @classmethod
    def constant(cls, nvars: int, c, names=None) -> MultiPoly:
        c = rf(c)
        return cls(nvars, {(0,) * nvars: c} if c else {}, names, _clean=True)

    @classmethod
    def monomial(cls, exp: Exponent, c=1, names=None) -> MultiPoly:
        c = rf(c)
        return cls(len(exp), {tuple(exp): c} if c else {}, names, _clean=True)

    @classmethod
    def var(cls, nvars: int, i: int, names=None) -> MultiPoly:
        e = [0] * nvars
        e[i] = 1
        return cls.monomial(tuple(e), 1, names)

    def _new(self, terms) -> MultiPoly:
        return MultiPoly(self.nvars, terms, self.names, _clean=True)

    # -- predicates / inspection -------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {sum(e) for e in self.terms}

    def total_degree(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def has_negative_exponents(self) -> bool:
        return any(x < 0 for e in self.terms for x in e)

    def coefficient(self, exp: Exponent) -> RationalFunction:
        return self.terms.get(tuple(exp), RationalFunction())

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: MultiPoly):
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.nvars, other, self.names)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.nvars, other, self.names)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> MultiPoly:
        c = rf(c)
        if not c:
            return MultiPoly.zero(self.nvars, self.names)
        if c.is_one():
            return self
        return self._new({e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                w = out.get(e)
                out[e] = v if w is None else w + v
        return self._new({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.constant(self.nvars, 1, self.names)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_monomial(self, exp: Exponent, c: RationalFunction = ONE) -> MultiPoly:
        out = {}
        for e, v in self.terms.items():
            out[tuple(a + b for a, b in zip(e, exp))] = v * c if not c.is_one() else v
        return self._new(out)

    def diff(self, i: int, times: int = 1) -> MultiPoly:
        """Partial derivative with respect to variable ``i``."""
        out = self.terms
        for _ in range(times):
            nxt = {}
            for e, c in out.items():
                a = e[i]
                if a == 0:
                    continue
                ne = e[:i] + (a - 1,) + e[i + 1:]
                nxt[ne] = c * a
            out = nxt
        return self._new(out)

    def diff_multi(self, beta: Iterable[int]) -> MultiPoly:
        p = self
        for i, b in enumerate(beta):
            if b:
                p = p.diff(i, b)
                if not p:
                    break
        return p

    def diff_E(self) -> MultiPoly:
        out = {}
        for e, c in self.terms.items():
            d = c.derivative()
            if d:
                out[e] = d
        return self._new(out)

    def euler(self) -> MultiPoly:
        """sum_i z_i d/dz_i."""
        return self._new({e: c * sum(e) for e, c in self.terms.items() if sum(e) != 0})

    def subs_E(self, value) -> MultiPoly:
        out = {}
        for e, c in self.terms.items():
            v = rf(c(value))
            if v:
                out[e] = v
        return self._new(out)

    def evaluate(self, point: list) -> RationalFunction:
        """Evaluate at a point whose coordinates are RationalFunction or rational numbers."""
        total = RationalFunction()
        pts = [rf(p) for p in point]
        for e, c in self.terms.items():
            term = c
            for p, a in zip(pts, e):
                if a:
                    term = term * p**a
            total = total + term
        return total

    def with_names(self, names) -> MultiPoly:
        return MultiPoly(self.nvars, self.terms, names, _clean=True)

    # -- comparisons --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction, RationalFunction)):
            return self == MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- printing -----------------------------------------------------------
    def sorted_terms(self):
        """Terms by decreasing degree, then decreasing exponent tuple (deterministic)."""
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (n if a == 1 else f"{n}^{a}") for n, a in zip(self.names, e) if a != 0
            )
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif c.is_one():
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                if " " in cs:
                    cs = f"({cs})"
                parts.append(f"{cs}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"MultiPoly({self})"


def monomial_degree(exp: Exponent) -> int:
    return sum(exp)


def homogenize(H: MultiPoly, n: int | None = None) -> MultiPoly:
    """f = z0^deg(H) * (H(z_{2i-1}/z0, z_{2i}/z0) - E).

    ``H`` is affine in (x1, p1, ..., xn, pn); the coefficient field already
    contains E, so E-dependent Hamiltonians are allowed.
    """
    if n is None:
        n = H.nvars // 2
    if H.nvars != 2 * n:
        raise ValueError(f"affine polynomial must have {2 * n} variables, got {H.nvars}")
    HE = H - RationalFunction.E()
    if not HE or HE.total_degree() < 1 or H.is_zero() or H.total_degree() < 1:
        raise ValueError("cannot homogenize a constant Hamiltonian")
    D = HE.total_degree()
    out = {}
    for e, c in HE.terms.items():
        out[(D - sum(e),) + e] = c
    return MultiPoly(2 * n + 1, out, homogeneous_names(2 * n + 1), _clean=True)


def dehomogenize(q: MultiPoly) -> MultiPoly:
    """Set z0 = 1 and rename z_{2i-1}, z_{2i} to x_i, p_i."""
    n = (q.nvars - 1) // 2
    out: dict = {}
    for e, c in q.terms.items():
        ne = e[1:]
        v = out.get(ne)
        out[ne] = c if v is None else v + c
    return MultiPoly(2 * n, {e: c for e, c in out.items() if c}, affine_names(n), _clean=True)


def homogenize_to_degree(a: MultiPoly, degree: int) -> MultiPoly:
    """Homogenize an affine polynomial to exactly ``degree`` using z0.

    Terms of affine degree above ``degree`` would need a negative z0 power;
    they are kept (as Laurent monomials) so the caller can detect them.
    """
    out = {}
    for e, c in a.terms.items():
        out[(degree - sum(e),) + e] = c
    return MultiPoly(a.nvars + 1, out, homogeneous_names(a.nvars + 1), _clean=True)
