"""Matrix families and the ring homomorphism sigma from the Weyl algebra.

For a word w, sigma(w) records how e_i d^alpha w reduces, modulo the right
ideal generated by f_j - mhat^{-1} d_j, to sum_j c(t) e_j d^beta.  Entries are
polynomials in a commuting symbol t; on a term e_j d^beta q whose grade is m*
the monomial t^s means prod_{l<s} 1/(m* + l).

The alpha-dependence is exact and finite: every family is stored as

    g^{alpha, alpha + gamma} = sum_nu  binom(alpha, nu) * M[nu, gamma]

with binom(alpha, nu) = prod_i binom(alpha_i, nu_i).  This form is closed
under the diamond product (Vandermonde's identity), so families never have to
be sampled at particular alpha.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cache
from itertools import product as iproduct
from math import comb, factorial

from .errors import GradeError
from .forms import GradedPolynomial
from .hypersurface import Hypersurface
from .poly import MultiPoly
from .ratfunc import ONE, ZERO, RationalFunction, rf
from .weyl import WeylElement

Exponent = tuple[int, ...]
SCHEMA = "qperiods.matrix_family/1"


# ---------------------------------------------------------------------------
# polynomials in t
# ---------------------------------------------------------------------------

def tp_trim(p) -> tuple:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return tuple(p)


def tp_add(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    n = max(len(a), len(b))
    return tp_trim((a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n))


def tp_mul(a: tuple, b: tuple) -> tuple:
    if not a or not b:
        return ()
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = out[i + j] + x * y
    return tp_trim(out)


def tp_scale(a: tuple, c) -> tuple:
    c = rf(c)
    if not c:
        return ()
    return tuple(x * c for x in a)


def tp_shift(a: tuple, s: int) -> tuple:
    """t^s * a."""
    return (ZERO,) * s + a if a else ()


def tp_eval(a: tuple, m) -> RationalFunction:
    """Substitute t^s -> prod_{l<s} 1/(m + l)."""
    m = Fraction(m)
    total = ZERO
    fac = Fraction(1)
    for s, c in enumerate(a):
        if s:
            v = m + s - 1
            if v == 0:
                raise GradeError(f"t-evaluation hits a pole at grade {m}")
            fac /= v
        if c:
            total = total + c * fac
    return total


def tp_str(a: tuple) -> str:
    if not a:
        return "0"
    parts = []
    for s, c in enumerate(a):
        if not c:
            continue
        cs = str(c)
        if " " in cs or "/" in cs:
            cs = f"({cs})"
        if s == 0:
            parts.append(cs)
        else:
            mono = "t" if s == 1 else f"t^{s}"
            parts.append(mono if c.is_one() else f"{cs}*{mono}")
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# binomial bookkeeping
# ---------------------------------------------------------------------------

def gbinom(g: int, k: int) -> int:
    """binom(g, k) for any integer g and k >= 0 (zero for k < 0)."""
    if k < 0:
        return 0
    if g >= 0:
        return comb(g, k)
    num = 1
    for i in range(k):
        num *= g - i
    return num // factorial(k)


def multi_binom(alpha: Exponent, nu: Exponent) -> int:
    out = 1
    for a, n in zip(alpha, nu):
        if n > a:
            return 0
        out *= comb(a, n)
    return out


@cache
def _vandermonde(g: int, b: int) -> tuple:
    """binom(x + g, b) = sum_j coeff_j binom(x, j)."""
    return tuple((j, gbinom(g, b - j)) for j in range(b + 1) if gbinom(g, b - j))


@cache
def _binom_product(a: int, b: int) -> tuple:
    """binom(x, a) binom(x, b) = sum_c coeff_c binom(x, c)."""
    out = []
    for c in range(max(a, b), a + b + 1):
        v = comb(c, a) * comb(a, a + b - c)
        if v:
            out.append((c, v))
    return tuple(out)


@cache
def _compose_1d(n1: int, g1: int, n2: int) -> tuple:
    """binom(x, n1) * binom(x + g1, n2) expanded in binom(x, c)."""
    acc: dict = {}
    for j, cj in _vandermonde(g1, n2):
        for c, cc in _binom_product(n1, j):
            acc[c] = acc.get(c, 0) + cj * cc
    return tuple((c, v) for c, v in sorted(acc.items()) if v)


def _compose(nu1: Exponent, gamma1: Exponent, nu2: Exponent) -> list:
    per = [_compose_1d(a, g, b) for a, g, b in zip(nu1, gamma1, nu2)]
    out = []
    for combo in iproduct(*per):
        nu = tuple(c for c, _ in combo)
        coeff = 1
        for _, v in combo:
            coeff *= v
        out.append((nu, coeff))
    return out


# ---------------------------------------------------------------------------
# sparse matrices with t-polynomial entries
# ---------------------------------------------------------------------------

def mat_add_into(dst: dict, src: dict, c: int | RationalFunction = 1):
    for ij, v in src.items():
        v = v if c == 1 else tp_scale(v, c)
        w = dst.get(ij)
        nv = v if w is None else tp_add(w, v)
        if nv:
            dst[ij] = nv
        elif w is not None:
            del dst[ij]


def mat_mul(a: dict, b: dict) -> dict:
    by_row: dict = {}
    for (k, j), v in b.items():
        by_row.setdefault(k, []).append((j, v))
    out: dict = {}
    for (i, k), u in a.items():
        for j, v in by_row.get(k, ()):
            p = tp_mul(u, v)
            w = out.get((i, j))
            nv = p if w is None else tp_add(w, p)
            if nv:
                out[(i, j)] = nv
            elif w is not None:
                del out[(i, j)]
    return out


class MatrixFamily:
    """Finitely supported family alpha, beta -> d x d matrix over Q(E)[t] (binomial form).

    ``entries`` maps (nu, gamma) to a sparse matrix {(i, j): t-polynomial}.
    ``ipow`` is a global power of the imaginary unit.
    """

    def __init__(self, X: Hypersurface, entries: dict | None = None, ipow: int = 0):
        self.X = X
        self.N = X.N
        self.d = X.d
        self.entries = {k: v for k, v in (entries or {}).items() if v}
        self.ipow = ipow % 4
        if self.ipow >= 2:
            self.entries = {k: {ij: tp_scale(p, -1) for ij, p in m.items()} for k, m in self.entries.items()}
            self.ipow -= 2

    @classmethod
    def delta(cls, X: Hypersurface) -> MatrixFamily:
        z = (0,) * X.N
        return cls(X, {(z, z): {(i, i): (ONE,) for i in range(X.d)}})

    @classmethod
    def zero(cls, X: Hypersurface) -> MatrixFamily:
        return cls(X, {})

    def value(self, alpha: Exponent, beta: Exponent) -> dict:
        """The matrix g^{alpha, beta}."""
        gamma = tuple(b - a for a, b in zip(alpha, beta))
        out: dict = {}
        for (nu, g), m in self.entries.items():
            if g != gamma:
                continue
            c = multi_binom(alpha, nu)
            if c:
                mat_add_into(out, m, c)
        return out

    def offsets(self) -> set:
        """All gamma = beta - alpha carrying a nonzero matrix for some alpha."""
        return {g for (_, g) in self.entries}

    def support_at(self, alpha: Exponent) -> set:
        """beta with g^{alpha, beta} != 0."""
        out = set()
        for g in self.offsets():
            beta = tuple(a + x for a, x in zip(alpha, g))
            if min(beta) >= 0 and self.value(alpha, beta):
                out.add(beta)
        return out

    def __add__(self, other: MatrixFamily):
        if self.ipow != other.ipow and (self.entries and other.entries):
            raise ValueError("cannot add families with different powers of i")
        out = {k: dict(v) for k, v in self.entries.items()}
        for k, m in other.entries.items():
            dst = out.setdefault(k, {})
            mat_add_into(dst, m)
            if not dst:
                del out[k]
        ipow = self.ipow if self.entries else other.ipow
        return MatrixFamily(self.X, out, ipow)

    def __neg__(self):
        return MatrixFamily(self.X, {k: {ij: tp_scale(p, -1) for ij, p in m.items()} for k, m in self.entries.items()}, self.ipow)

    def __sub__(self, other):
        return self + (-other)

    def diamond(self, other: MatrixFamily) -> MatrixFamily:
        """(g1 <> g2)^{alpha, delta} = sum_beta g1^{alpha, beta} g2^{beta, delta}."""
        out: dict = {}
        for (nu1, g1), m1 in self.entries.items():
            for (nu2, g2), m2 in other.entries.items():
                prod = mat_mul(m1, m2)
                if not prod:
                    continue
                gamma = tuple(a + b for a, b in zip(g1, g2))
                for nu, c in _compose(nu1, g1, nu2):
                    dst = out.setdefault((nu, gamma), {})
                    mat_add_into(dst, prod, c)
                    if not dst:
                        del out[(nu, gamma)]
        return MatrixFamily(self.X, out, self.ipow + other.ipow)

    def __eq__(self, other):
        if not isinstance(other, MatrixFamily):
            return NotImplemented
        if not self.entries and not other.entries:
            return True
        return self.ipow == other.ipow and self.entries == other.entries

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        basis = [list(e) for e in self.X.basis.monomials]
        entries = []
        for (nu, g) in sorted(self.entries):
            m = self.entries[(nu, g)]
            rows = [[tp_str(m.get((i, j), ())) for j in range(self.d)] for i in range(self.d)]
            entries.append({"nu": list(nu), "gamma": list(g), "matrix": rows})
        return {
            "schema": SCHEMA,
            "f": str(self.X.f),
            "d": self.d,
            "nvars": self.N,
            "ipow": self.ipow,
            "basis": basis,
            "entries": entries,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, X: Hypersurface, data: dict | str) -> MatrixFamily:
        from .parse import parse_tpoly

        if isinstance(data, str):
            data = json.loads(data)
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        if [tuple(e) for e in data["basis"]] != list(X.basis.monomials):
            raise ValueError("serialized family uses a different quotient basis")
        entries = {}
        for ent in data["entries"]:
            m = {}
            for i, row in enumerate(ent["matrix"]):
                for j, s in enumerate(row):
                    p = parse_tpoly(s)
                    if p:
                        m[(i, j)] = p
            entries[(tuple(ent["nu"]), tuple(ent["gamma"]))] = m
        return cls(X, entries, data.get("ipow", 0))


# ---------------------------------------------------------------------------
# the reduction modulo J_M and sigma
# ---------------------------------------------------------------------------

class SigmaEngine:
    """Computes sigma on a fixed smooth hypersurface; reductions are memoized per monomial."""

    def __init__(self, X: Hypersurface):
        X.require_smooth()
        self.X = X
        self.gb = X.gb
        self.basis = X.basis.monomials
        self.index = {e: k for k, e in enumerate(self.basis)}
        self._memo: dict[Exponent, dict] = {}
        self._units = [tuple(1 if j == i else 0 for j in range(X.N)) for i in range(X.N)]

    def reduce_monomial(self, c: Exponent) -> dict:
        """z^c d^gamma == sum (j, kappa) -> tpoly  e_j d^(gamma + kappa)   (any gamma)."""
        hit = self._memo.get(c)
        if hit is not None:
            return hit
        X = self.X
        mono = MultiPoly.monomial(c, 1, X.f.names)
        r, cofs = self.gb.normal_form_with_cofactors(mono)
        out: dict = {}
        zero = (0,) * X.N
        for e, v in r.terms.items():
            _acc(out, (self.index[e], zero), (v,))
        for j, w in enumerate(cofs):
            if not w:
                continue
            uj = self._units[j]
            # t * (w_j d^(kappa + u_j) + (d w_j / d z_j) d^kappa)
            for e, v in w.terms.items():
                for (k, kappa), p in self.reduce_monomial(e).items():
                    key = (k, tuple(a + b for a, b in zip(kappa, uj)))
                    _acc(out, key, tp_shift(tp_scale(p, v), 1))
            for e, v in w.diff(j).terms.items():
                for key, p in self.reduce_monomial(e).items():
                    _acc(out, key, tp_shift(tp_scale(p, v), 1))
        self._memo[c] = out
        return out

    def sigma(self, w: WeylElement) -> MatrixFamily:
        """sigma of an element of the plain Weyl algebra (mhat expanded, no shifts)."""
        if not w.is_pure():
            w = w.expand_mhat()
        entries: dict = {}
        for (s, a, b), q in w.terms.items():
            c = q.constant_value()
            ranges = [range(x + 1) for x in a]
            for nu in iproduct(*ranges):
                fall = 1
                for ai, ni in zip(a, nu):
                    fall *= factorial(ai) // factorial(ai - ni)
                coeff = c * fall
                rest = tuple(ai - ni for ai, ni in zip(a, nu))
                for i, e in enumerate(self.basis):
                    prod_exp = tuple(x + y for x, y in zip(e, rest))
                    for (j, kappa), p in self.reduce_monomial(prod_exp).items():
                        gamma = tuple(bi - ni + ki for bi, ni, ki in zip(b, nu, kappa))
                        dst = entries.setdefault((nu, gamma), {})
                        mat_add_into(dst, {(i, j): p}, coeff)
                        if not dst:
                            del entries[(nu, gamma)]
        return MatrixFamily(self.X, entries, w.ipow)

    def z_matrices(self, i: int) -> dict:
        """{nu: Z_i^nu} for sigma(z_i) = (u_i . alpha) delta^{alpha - u_i} + sum_nu Z_i^nu delta^{alpha + nu}."""
        fam = self.sigma(WeylElement.z(self.X.N, self.X.D, i))
        zero = (0,) * self.X.N
        out = {}
        for (nu, g), m in fam.entries.items():
            if nu == zero:
                out[g] = m
            elif not (nu == self._units[i] and g == tuple(-x for x in self._units[i])):
                raise AssertionError("unexpected alpha dependence in sigma(z_i)")  # pragma: no cover
        return out


def _acc(dst: dict, key, p: tuple):
    if not p:
        return
    w = dst.get(key)
    nv = p if w is None else tp_add(w, p)
    if nv:
        dst[key] = nv
    elif w is not None:
        del dst[key]


def engine_for(X: Hypersurface) -> SigmaEngine:
    eng = X.__dict__.get("_sigma_engine")
    if eng is None:
        eng = SigmaEngine(X)
        X.__dict__["_sigma_engine"] = eng
    return eng


def sigma(w: WeylElement, X: Hypersurface) -> MatrixFamily:
    return engine_for(X).sigma(w)


def z_matrices(X: Hypersurface, i: int) -> dict:
    return engine_for(X).z_matrices(i)


def diamond(g1: MatrixFamily, g2: MatrixFamily) -> MatrixFamily:
    return g1.diamond(g2)


# ---------------------------------------------------------------------------
# row vectors and the mu action
# ---------------------------------------------------------------------------

class RowFamily:
    """The alpha = 0 row of a family applied to u-hat = e_1: beta -> {j: tpoly}."""

    def __init__(self, X: Hypersurface, rows: dict | None = None, ipow: int = 0):
        self.X = X
        self.rows = {b: r for b, r in (rows or {}).items() if r}
        self.ipow = ipow % 4
        if self.ipow >= 2:
            self.rows = {b: {j: tp_scale(p, -1) for j, p in r.items()} for b, r in self.rows.items()}
            self.ipow -= 2

    @classmethod
    def unit(cls, X: Hypersurface) -> RowFamily:
        return cls(X, {(0,) * X.N: {0: (ONE,)}})

    @classmethod
    def from_family(cls, g: MatrixFamily) -> RowFamily:
        zero = (0,) * g.N
        rows: dict = {}
        for (nu, gamma), m in g.entries.items():
            if nu != zero or min(gamma) < 0:
                continue
            r = {j: p for (i, j), p in m.items() if i == 0}
            if r:
                dst = rows.setdefault(gamma, {})
                for j, p in r.items():
                    _acc(dst, j, p)
        return cls(g.X, rows, g.ipow)

    def __add__(self, other: RowFamily):
        if not other.rows:
            return self
        if not self.rows:
            return other
        if self.ipow != other.ipow:
            raise ValueError("cannot add rows with different powers of i")
        out = {b: dict(r) for b, r in self.rows.items()}
        for b, r in other.rows.items():
            dst = out.setdefault(b, {})
            for j, p in r.items():
                _acc(dst, j, p)
        return RowFamily(self.X, out, self.ipow)

    def diamond(self, g: MatrixFamily, keep=None) -> RowFamily:
        """row <> g; ``keep(beta)`` may prune output indices that can no longer matter."""
        by_nu: dict = {}
        for (nu, gamma), m in g.entries.items():
            rowsplit: dict = {}
            for (i, j), p in m.items():
                rowsplit.setdefault(i, []).append((j, p))
            by_nu.setdefault(nu, []).append((gamma, rowsplit))
        out: dict = {}
        for beta, r in self.rows.items():
            for nu, items in by_nu.items():
                c = multi_binom(beta, nu)
                if not c:
                    continue
                for gamma, rowsplit in items:
                    delta = tuple(x + y for x, y in zip(beta, gamma))
                    if min(delta) < 0 or (keep is not None and not keep(delta)):
                        continue
                    dst = out.setdefault(delta, {})
                    for i, u in r.items():
                        for j, p in rowsplit.get(i, ()):
                            _acc(dst, j, tp_scale(tp_mul(u, p), c))
        return RowFamily(self.X, out, self.ipow + g.ipow)

    def __eq__(self, other):
        return isinstance(other, RowFamily) and self.ipow == other.ipow and self.rows == other.rows


def mu_apply_row(row: RowFamily, q: GradedPolynomial) -> GradedPolynomial:
    """sum_beta (row^beta . e-hat) d^beta q with t evaluated on each produced grade."""
    X = row.X
    D, N = X.D, X.N
    basis = X.basis.monomials
    out: dict = {}
    for m, piece in q.pieces.items():
        for beta, r in row.rows.items():
            dq = piece.diff_multi(beta)
            if not dq:
                continue
            deg_dq = dq.total_degree()
            for j, p in r.items():
                e = basis[j]
                deg = deg_dq + sum(e)
                mstar = Fraction(deg + N, D)
                if mstar.denominator != 1:
                    raise GradeError(f"term e_{j + 1} d^{beta} q has non-integral grade {mstar}")
                val = tp_eval(p, mstar)
                if not val:
                    continue
                term = dq.mul_monomial(e, val)
                mi = int(mstar)
                out[mi] = out[mi] + term if mi in out else term
    return GradedPolynomial(X, out, check=False)


def mu_apply(g: MatrixFamily, q: GradedPolynomial) -> GradedPolynomial:
    """mu(g, q) = sum_{beta} (u-hat g^{0, beta} e-hat) d^beta q (real part; see ``g.ipow``)."""
    return mu_apply_row(RowFamily.from_family(g), q)
