"""Exact rational functions in the energy parameter E.

Numerator and denominator are ``flint.fmpq_poly`` values; the denominator is
kept monic and coprime to the numerator, so equality is structural.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm

import flint

_ZERO = flint.fmpq_poly([])
_ONE = flint.fmpq_poly([1])


def _as_poly(value) -> flint.fmpq_poly:
    if isinstance(value, flint.fmpq_poly):
        return value
    if isinstance(value, Fraction):
        return flint.fmpq_poly([flint.fmpq(value.numerator, value.denominator)])
    if isinstance(value, (int, flint.fmpq, flint.fmpz)):
        return flint.fmpq_poly([value])
    raise TypeError(f"cannot interpret {value!r} as a polynomial in E")


class RationalFunction:
    """An element of Q(E) in lowest terms with monic denominator."""

    __slots__ = ("_hash", "den", "num")

    def __init__(self, num=0, den=None, *, _normalized: bool = False):
        num = _as_poly(num)
        if den is None:
            self.num, self.den = num, _ONE
        else:
            den = _as_poly(den)
            if _normalized:
                self.num, self.den = num, den
            else:
                if den == 0:
                    raise ZeroDivisionError("rational function with zero denominator")
                self.num, self.den = _normalize(num, den)
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def E(cls) -> RationalFunction:
        return cls(flint.fmpq_poly([0, 1]))

    @classmethod
    def coerce(cls, value) -> RationalFunction:
        if isinstance(value, RationalFunction):
            return value
        return cls(value)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num == 0

    def is_one(self) -> bool:
        return self.den == _ONE and self.num == _ONE

    def is_constant(self) -> bool:
        return self.den == _ONE and self.num.degree() <= 0

    def __bool__(self) -> bool:
        return self.num != 0

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction(other)
            except TypeError:
                return NotImplemented
        if other.num == 0:
            return self
        if self.num == 0:
            return other
        if self.den == other.den:
            if self.den == _ONE:
                return RationalFunction(self.num + other.num, _ONE, _normalized=True)
            return RationalFunction(self.num + other.num, self.den)
        if other.den == _ONE:
            return RationalFunction(self.num + other.num * self.den, self.den, _normalized=True)
        if self.den == _ONE:
            return RationalFunction(self.num * other.den + other.num, other.den, _normalized=True)
        g = self.den.gcd(other.den)
        if g == _ONE:
            return RationalFunction(
                self.num * other.den + other.num * self.den, self.den * other.den, _normalized=True
            )
        a = self.den // g
        b = other.den // g
        return RationalFunction(self.num * b + other.num * a, a * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RationalFunction(other) - self

    def __mul__(self, other):
        if not isinstance(other, RationalFunction):
            if isinstance(other, (int, Fraction, flint.fmpq)):
                if other == 0:
                    return RationalFunction()
                return RationalFunction(self.num * _as_poly(other), self.den, _normalized=True)
            return NotImplemented
        if self.num == 0 or other.num == 0:
            return RationalFunction()
        if self.den == _ONE and other.den == _ONE:
            return RationalFunction(self.num * other.num, _ONE, _normalized=True)
        # cross-cancel before multiplying
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1 = self.num // g1 if g1 != _ONE else self.num
        n2 = other.num // g2 if g2 != _ONE else other.num
        d1 = self.den // g2 if g2 != _ONE else self.den
        d2 = other.den // g1 if g1 != _ONE else other.den
        num = n1 * n2
        den = d1 * d2
        lc = den.coeffs()[-1]
        if lc != 1:
            num, den = num / lc, den / lc
        return RationalFunction(num, den, _normalized=True)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if self.num == 0:
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RationalFunction(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num**k, self.den**k, _normalized=True)

    # -- calculus / evaluation ---------------------------------------------
    def derivative(self) -> RationalFunction:
        """d/dE."""
        if self.den == _ONE:
            return RationalFunction(self.num.derivative(), _ONE, _normalized=True)
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den
        )

    def __call__(self, value):
        """Evaluate at E = value (a rational number)."""
        v = flint.fmpq(Fraction(value).numerator, Fraction(value).denominator)
        d = self.den(v)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at E = {value}")
        r = self.num(v) / d
        return Fraction(int(r.p), int(r.q))

    def integer_parts(self) -> tuple[list[int], list[int]]:
        """Integer coefficient lists (low to high) of num, den with the denominator
        primitive and positive-leading."""
        nd = [Fraction(int(c.p), int(c.q)) for c in self.num.coeffs()]
        dd = [Fraction(int(c.p), int(c.q)) for c in self.den.coeffs()]
        scale = reduce(lcm, (c.denominator for c in nd + dd), 1)
        ni = [int(c * scale) for c in nd]
        di = [int(c * scale) for c in dd]
        g = reduce(gcd, ni + di, 0) or 1
        return [c // g for c in ni], [c // g for c in di]

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self.num.coeffs()), tuple(self.den.coeffs())))
        return self._hash

    def __str__(self):
        ni, di = self.integer_parts()
        num = _poly_str(ni)
        if di == [1]:
            return num
        den = _poly_str(di)
        if sum(1 for c in ni if c) > 1:
            num = f"({num})"
        if sum(1 for c in di if c) > 1 or "*" in den or "^" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RationalFunction({self})"


def _normalize(num: flint.fmpq_poly, den: flint.fmpq_poly):
    if num == 0:
        return _ZERO, _ONE
    g = num.gcd(den)
    if g != _ONE:
        num = num // g
        den = den // g
    lc = den.coeffs()[-1]
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def _poly_str(coeffs: list[int]) -> str:
    """Integer polynomial in E, decreasing degree, e.g. ``-135*E - 4``."""
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = "E" if k == 1 else f"E^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


ZERO = RationalFunction()
ONE = RationalFunction(1)
E = RationalFunction.E()


def rf(value) -> RationalFunction:
    """Shorthand coercion used throughout the package."""
    return RationalFunction.coerce(value)
