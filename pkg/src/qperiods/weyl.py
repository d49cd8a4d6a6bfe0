"""The Weyl algebra in z_0..z_{2n}, d/dz_0..d/dz_{2n} and its localization at polynomials in m-hat.

A term ``(s, alpha, beta) -> q`` stands for ``q(mhat) S^s z^alpha d^beta`` with
``mhat = (sum_i z_i d_i + 2n + 1) / D`` and S the shift satisfying
``q(mhat) S = S q(mhat + 1)``.  Coefficients are rational functions of mhat
whose denominators are products of linear factors (mhat + c), c rational; every
denominator the engine produces (inverses of mhat and their shifts) has this
form.

Since [mhat, z^a d^b] = ((|a| - |b|) / D) z^a d^b, moving a coefficient to the
left across a word lowers its argument:  w q(mhat) = q(mhat - g_w) w.

Elements also carry a power of the imaginary unit, ``ipow`` (mod 4), so
that i^k prefactors stay exact while every stored coefficient is real.
"""

from __future__ import annotations

from collections.abc import Iterable
from fractions import Fraction
from functools import cache
from itertools import product as iproduct
from math import comb, factorial

from .errors import InhomogeneousElement
from .poly import MultiPoly
from .ratfunc import ONE, ZERO, RationalFunction, rf

Exponent = tuple[int, ...]


# ---------------------------------------------------------------------------
# rational functions of mhat
# ---------------------------------------------------------------------------

def _poly_trim(p: list) -> tuple:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(p)


def _poly_mul(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return _poly_trim(out)


def _poly_add(a: tuple, b: tuple) -> tuple:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)]
    return _poly_trim(out)


def _poly_eval(p: tuple, x: Fraction) -> RationalFunction:
    acc = ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_shift(p: tuple, a: Fraction) -> tuple:
    """Coefficients of p(x + a)."""
    if not p or a == 0:
        return p
    out = list(p)
    n = len(out)
    # repeated synthetic division (Taylor shift)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + out[j + 1] * a
    return _poly_trim(out)


def _poly_div_linear(p: tuple, c: Fraction) -> tuple:
    """p / (x + c), assuming exact division."""
    n = len(p) - 1
    q = [ZERO] * n
    carry = ZERO
    for k in range(n, 0, -1):
        carry = p[k] + carry * (-c) if k != n else p[k]
        q[k - 1] = carry
    return _poly_trim(q)


class MhatRational:
    """num(mhat) / prod (mhat + c)^k with num over Q(E) and c rational."""

    __slots__ = ("_hash", "den", "num")

    def __init__(self, num: Iterable = (), den: dict | None = None, *, _clean: bool = False):
        num = _poly_trim([rf(c) for c in num]) if not _clean else tuple(num)
        den = {Fraction(c): k for c, k in (den or {}).items() if k}
        if not _clean:
            num, den = self._cancel(num, den)
        self.num = num
        self.den = tuple(sorted(den.items())) if isinstance(den, dict) else den
        self._hash = None

    @staticmethod
    def _cancel(num: tuple, den: dict):
        if not num:
            return (), {}
        for c in list(den):
            while den.get(c, 0) > 0 and not _poly_eval(num, -c):
                num = _poly_div_linear(num, c)
                den[c] -= 1
            if den.get(c) == 0:
                del den[c]
        return num, den

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c) -> MhatRational:
        c = rf(c)
        return cls((c,) if c else (), {}, _clean=True)

    @classmethod
    def mhat(cls) -> MhatRational:
        return cls((ZERO, ONE), {}, _clean=True)

    @classmethod
    def inv_linear(cls, c=0, power: int = 1) -> MhatRational:
        """(mhat + c)^(-power)."""
        return cls((ONE,), {Fraction(c): power}, _clean=True)

    @classmethod
    def from_poly(cls, coeffs: Iterable) -> MhatRational:
        return cls(coeffs)

    # -- predicates ---------------------------------------------------------
    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return not self.den

    def is_constant(self) -> bool:
        return not self.den and len(self.num) <= 1

    def constant_value(self) -> RationalFunction:
        if not self.is_constant():
            raise ValueError("coefficient depends on mhat")
        return self.num[0] if self.num else ZERO

    # -- arithmetic ---------------------------------------------------------
    def __mul__(self, other):
        if not isinstance(other, MhatRational):
            c = rf(other)
            if not c:
                return MhatRational()
            return MhatRational(tuple(x * c for x in self.num), dict(self.den), _clean=True)
        if not self.num or not other.num:
            return MhatRational()
        den = dict(self.den)
        for c, k in other.den:
            den[c] = den.get(c, 0) + k
        return MhatRational(_poly_mul(self.num, other.num), den)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, MhatRational):
            other = MhatRational.const(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return MhatRational(_poly_add(self.num, other.num), dict(self.den))
        a, b = dict(self.den), dict(other.den)
        common = {c: max(a.get(c, 0), b.get(c, 0)) for c in set(a) | set(b)}
        na, nb = self.num, other.num
        for c, k in common.items():
            lin = (rf(c), ONE)
            for _ in range(k - a.get(c, 0)):
                na = _poly_mul(na, lin)
            for _ in range(k - b.get(c, 0)):
                nb = _poly_mul(nb, lin)
        return MhatRational(_poly_add(na, nb), common)

    __radd__ = __add__

    def __neg__(self):
        return MhatRational(tuple(-x for x in self.num), dict(self.den), _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def shift(self, a) -> MhatRational:
        """q(mhat + a)."""
        a = Fraction(a)
        if a == 0 or not self.num:
            return self
        den = {c + a: k for c, k in self.den}
        return MhatRational(_poly_shift(self.num, a), den, _clean=True)

    def evaluate(self, x) -> RationalFunction:
        x = Fraction(x)
        val = _poly_eval(self.num, x)
        for c, k in self.den:
            v = x + c
            if v == 0:
                raise ZeroDivisionError(f"mhat-coefficient has a pole at mhat = {x}")
            val = val * rf(v) ** (-k)
        return val

    def __eq__(self, other):
        if not isinstance(other, MhatRational):
            other = MhatRational.const(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __str__(self):
        if not self.num:
            return "0"
        terms = []
        for k in range(len(self.num) - 1, -1, -1):
            c = self.num[k]
            if not c:
                continue
            mono = "" if k == 0 else ("m" if k == 1 else f"m^{k}")
            cs = str(c)
            if mono:
                terms.append(mono if c.is_one() else f"({cs})*{mono}")
            else:
                terms.append(cs)
        s = " + ".join(terms)
        if not self.den:
            return s
        dens = []
        for c, k in self.den:
            lin = "m" if c == 0 else (f"(m + {c})" if c > 0 else f"(m - {-c})")
            dens.append(lin if k == 1 else f"{lin}^{k}")
        return f"({s})/({'*'.join(dens)})"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Weyl elements
# ---------------------------------------------------------------------------

@cache
def _leibniz(b: Exponent, a: Exponent) -> tuple:
    """d^b z^a = sum_nu C(b,nu) a!/(a-nu)! z^(a-nu) d^(b-nu); returns (nu, integer coefficient) list."""
    ranges = [range(min(x, y) + 1) for x, y in zip(b, a)]
    out = []
    for nu in iproduct(*ranges):
        c = 1
        for bi, ai, ni in zip(b, a, nu):
            c *= comb(bi, ni) * factorial(ai) // factorial(ai - ni)
        out.append((nu, c))
    return tuple(out)


def normal_order_word(a1: Exponent, b1: Exponent, a2: Exponent, b2: Exponent) -> list:
    """z^a1 d^b1 z^a2 d^b2 as a list of (alpha, beta, integer coefficient)."""
    out = []
    for nu, c in _leibniz(b1, a2):
        alpha = tuple(x + y - n for x, y, n in zip(a1, a2, nu))
        beta = tuple(x + y - n for x, y, n in zip(b1, b2, nu))
        out.append((alpha, beta, c))
    return out


class WeylElement:
    """Normal-ordered element of the localized Weyl algebra (times i^ipow)."""

    __slots__ = ("D", "N", "ipow", "terms")

    def __init__(self, N: int, D: int, terms: dict | None = None, ipow: int = 0, *, _clean: bool = False):
        self.N = N
        self.D = D
        self.ipow = ipow % 4
        if _clean:
            self.terms = terms or {}
        else:
            self.terms = {}
            for key, c in (terms or {}).items():
                if not isinstance(c, MhatRational):
                    c = MhatRational.const(c)
                if c:
                    s, a, b = key
                    self.terms[(int(s), tuple(a), tuple(b))] = c
        # fold a global sign into the coefficients so that ipow is 0 or 1
        if self.ipow >= 2:
            self.terms = {k: -v for k, v in self.terms.items()}
            self.ipow -= 2

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, N: int, D: int) -> WeylElement:
        return cls(N, D, {}, _clean=True)

    @classmethod
    def scalar(cls, N: int, D: int, c) -> WeylElement:
        c = c if isinstance(c, MhatRational) else MhatRational.const(c)
        z = (0,) * N
        return cls(N, D, {(0, z, z): c} if c else {}, _clean=True)

    @classmethod
    def one(cls, N: int, D: int) -> WeylElement:
        return cls.scalar(N, D, 1)

    @classmethod
    def monomial(cls, alpha: Exponent, beta: Exponent, D: int, c=1, s: int = 0) -> WeylElement:
        c = c if isinstance(c, MhatRational) else MhatRational.const(c)
        return cls(len(alpha), D, {(s, tuple(alpha), tuple(beta)): c} if c else {}, _clean=True)

    @classmethod
    def z(cls, N: int, D: int, i: int, power: int = 1) -> WeylElement:
        a = [0] * N
        a[i] = power
        return cls.monomial(tuple(a), (0,) * N, D)

    @classmethod
    def d(cls, N: int, D: int, i: int, power: int = 1) -> WeylElement:
        b = [0] * N
        b[i] = power
        return cls.monomial((0,) * N, tuple(b), D)

    @classmethod
    def from_poly(cls, p: MultiPoly, D: int) -> WeylElement:
        z = (0,) * p.nvars
        return cls(p.nvars, D, {(0, e, z): MhatRational.const(c) for e, c in p.terms.items()}, _clean=True)

    @classmethod
    def mhat(cls, N: int, D: int) -> WeylElement:
        """m-hat as an element of the coefficient ring (a single term)."""
        z = (0,) * N
        return cls(N, D, {(0, z, z): MhatRational.mhat()}, _clean=True)

    @classmethod
    def mhat_expanded(cls, N: int, D: int) -> WeylElement:
        """m-hat written in the generators: (sum z_i d_i + N) / D."""
        terms = {}
        inv = rf(Fraction(1, D))
        for i in range(N):
            u = tuple(1 if j == i else 0 for j in range(N))
            terms[(0, u, u)] = MhatRational.const(inv)
        z = (0,) * N
        terms[(0, z, z)] = MhatRational.const(rf(Fraction(N, D)))
        return cls(N, D, terms, _clean=True)

    @classmethod
    def shift_op(cls, N: int, D: int, s: int = 1) -> WeylElement:
        z = (0,) * N
        return cls(N, D, {(s, z, z): MhatRational.const(1)}, _clean=True)

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_pure(self) -> bool:
        """No shifts and only constant coefficients: an element of the plain Weyl algebra."""
        return all(s == 0 and c.is_constant() for (s, _, _), c in self.terms.items())

    def term_grade(self, key) -> Fraction:
        s, a, b = key
        return Fraction(sum(a) - sum(b), self.D) + s

    def mhat_grades(self) -> set[Fraction]:
        return {self.term_grade(k) for k in self.terms}

    # -- arithmetic ---------------------------------------------------------
    def _compatible(self, other: WeylElement):
        if (self.N, self.D) != (other.N, other.D):
            raise ValueError("Weyl elements over different hypersurface data")

    def __add__(self, other):
        if not isinstance(other, WeylElement):
            other = WeylElement.scalar(self.N, self.D, other)
        self._compatible(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        sign = _relative_sign(self.ipow, other.ipow)
        out = dict(self.terms)
        for k, v in other.terms.items():
            v = v if sign == 1 else -v
            w = out.get(k)
            if w is None:
                out[k] = v
            else:
                w = w + v
                if w:
                    out[k] = w
                else:
                    del out[k]
        return WeylElement(self.N, self.D, out, self.ipow, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.N, self.D, {k: -v for k, v in self.terms.items()}, self.ipow, _clean=True)

    def __sub__(self, other):
        if not isinstance(other, WeylElement):
            other = WeylElement.scalar(self.N, self.D, other)
        return self + (-other)

    def scale(self, c) -> WeylElement:
        c = rf(c)
        if not c:
            return WeylElement.zero(self.N, self.D)
        return WeylElement(self.N, self.D, {k: v * c for k, v in self.terms.items()}, self.ipow, _clean=True)

    def times_i(self, k: int = 1) -> WeylElement:
        return WeylElement(self.N, self.D, dict(self.terms), self.ipow + k, _clean=True)

    def real_part_ipow(self) -> tuple[WeylElement, int]:
        """(element with ipow 0, ipow)."""
        return WeylElement(self.N, self.D, dict(self.terms), 0, _clean=True), self.ipow

    def __mul__(self, other):
        if not isinstance(other, WeylElement):
            return self.scale(other)
        self._compatible(other)
        D = self.D
        out: dict = {}
        for (s1, a1, b1), q1 in self.terms.items():
            g1 = Fraction(sum(a1) - sum(b1), D) + s1
            for (s2, a2, b2), q2 in other.terms.items():
                q = q1 * q2.shift(-g1)
                if not q:
                    continue
                for alpha, beta, c in normal_order_word(a1, b1, a2, b2):
                    key = (s1 + s2, alpha, beta)
                    v = q * c
                    w = out.get(key)
                    if w is None:
                        out[key] = v
                    else:
                        w = w + v
                        if w:
                            out[key] = w
                        else:
                            del out[key]
        return WeylElement(self.N, self.D, out, self.ipow + other.ipow, _clean=True)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = WeylElement.one(self.N, self.D)
        for _ in range(k):
            out = out * self
        return out

    def expand_mhat(self) -> WeylElement:
        """Rewrite polynomial-in-mhat coefficients through mhat = (sum z d + N)/D.

        Only shift-free terms with polynomial coefficients can be expanded.
        """
        out = WeylElement(self.N, self.D, {}, self.ipow, _clean=True)
        mh = WeylElement.mhat_expanded(self.N, self.D)
        powers = [WeylElement.one(self.N, self.D)]
        for (s, a, b), q in self.terms.items():
            if s or not q.is_polynomial():
                raise ValueError("only shift-free, polynomial-in-mhat terms can be expanded")
            word = WeylElement.monomial(a, b, self.D)
            for k, c in enumerate(q.num):
                if not c:
                    continue
                while len(powers) <= k:
                    powers.append(powers[-1] * mh)
                piece = (powers[k] * word).scale(c)
                out = out + WeylElement(self.N, self.D, piece.terms, self.ipow, _clean=True)
        return out

    def __eq__(self, other):
        if not isinstance(other, WeylElement):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return (self.N, self.D, self.ipow) == (other.N, other.D, other.ipow) and self.terms == other.terms

    def __hash__(self):
        return hash((self.N, self.D, self.ipow, frozenset(self.terms.items())))

    # -- action on polynomials ---------------------------------------------
    def apply(self, p: MultiPoly) -> MultiPoly:
        """Act on a polynomial.  Coefficients in mhat are evaluated on the grade of each
        homogeneous output piece; shifted terms have no action on polynomials."""
        if self.ipow:
            raise ValueError("apply the real part (ipow = 0) and track the power of i separately")
        out = MultiPoly.zero(p.nvars, p.names)
        N, D = self.N, self.D
        for (s, a, b), q in self.terms.items():
            if s:
                raise ValueError("shift operators do not act on polynomials")
            piece = p.diff_multi(b)
            if not piece:
                continue
            piece = piece.mul_monomial(a)
            if q.is_constant():
                out = out + piece.scale(q.constant_value())
                continue
            by_deg: dict = {}
            for e, c in piece.terms.items():
                by_deg.setdefault(sum(e), {})[e] = c
            for deg, terms in by_deg.items():
                m = Fraction(deg + N, D)
                val = q.evaluate(m)
                out = out + MultiPoly(p.nvars, terms, p.names, _clean=True).scale(val)
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (s, a, b), q in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
            w = []
            if s:
                w.append("S" if s == 1 else f"S^{s}")
            w += [f"z{i}" if x == 1 else f"z{i}^{x}" for i, x in enumerate(a) if x]
            w += [f"d{i}" if x == 1 else f"d{i}^{x}" for i, x in enumerate(b) if x]
            parts.append(f"({q})" + ("*" + "*".join(w) if w else ""))
        body = " + ".join(parts)
        return body if not self.ipow else f"i*({body})"

    __repr__ = __str__


def _relative_sign(p: int, q: int) -> int:
    if p == q:
        return 1
    raise ValueError("cannot add Weyl elements with different powers of i (result would be complex)")


def mhat_grade(w: WeylElement) -> Fraction:
    """The unique g with [mhat, w] = g w; raises InhomogeneousElement for mixed elements."""
    grades = w.mhat_grades()
    if not grades:
        return Fraction(0)
    if len(grades) > 1:
        raise InhomogeneousElement(f"element mixes grades {sorted(grades)}")
    return next(iter(grades))


def build_ghat_k(f: MultiPoly, k: int, D: int | None = None) -> WeylElement:
    """The operator hat g_k on numerators, including its power of i.

    hat g_k = i^(-k) * ( -z0^k sum_{|beta|=k} (1/beta!) d^k f / dz_2^b1 ... dz_2n^bn  prod delta_i^b_i )
    with delta_i = z0 (d_{2i-1} - (df/dz_{2i-1}) mhat).  mhat is expanded into the
    generators, so the result is an element of the plain Weyl algebra.
    """
    N = f.nvars
    n = (N - 1) // 2
    D = D if D is not None else f.total_degree()
    if k < 1 or k > D:
        raise ValueError(f"k must satisfy 1 <= k <= {D}")
    mh = WeylElement.mhat_expanded(N, D)
    deltas = []
    for i in range(1, n + 1):
        x = 2 * i - 1
        d_x = WeylElement.d(N, D, x)
        fx = WeylElement.from_poly(f.diff(x), D)
        deltas.append(WeylElement.z(N, D, 0) * (d_x - fx * mh))
    total = WeylElement.zero(N, D)
    for beta in _compositions(k, n):
        idx = [0] * N
        for i, b in enumerate(beta, start=1):
            idx[2 * i] = b
        coeff = f.diff_multi(idx)
        if not coeff:
            continue
        bfact = 1
        for b in beta:
            bfact *= factorial(b)
        word = WeylElement.from_poly(coeff.scale(Fraction(1, bfact)), D)
        for dl, b in zip(deltas, beta):
            for _ in range(b):
                word = word * dl
        total = total + word
    z0k = WeylElement.z(N, D, 0, k)
    real = (z0k * total).scale(rf(-1))
    return real.times_i(-k)


def _compositions(k: int, n: int):
    """All beta in N^n with |beta| = k."""
    if n == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, n - 1):
            yield (first,) + rest
