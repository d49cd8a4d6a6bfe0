"""The hbar-expansion of the trace of delta(H - E) in terms of classical period classes.

Conventions.  With hbar~ = hbar / i the symbol operators are

    g_r = i^(-r) g~_r,   g~_r = -(1/(H - E)) (1/r!) sum_{|beta| = r} d_p^beta H  d_x^beta,

so every g~_r, and the matching numerator operator, is real.  The coefficient
of hbar^k is i^(-k) times a real class; for even k that is (-1)^(k/2).  The
global factor 2 pi i (2 pi hbar)^n is kept as metadata only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache
from math import factorial

from .errors import GradeError, UnsupportedCase
from .forms import GradedPolynomial, RationalForm, psi
from .hypersurface import Hypersurface
from .matrix_rep import MatrixFamily, RowFamily, engine_for, mu_apply_row
from .poly import MultiPoly, homogenize_to_degree
from .ratfunc import RationalFunction
from .reduction import CohomologyDecomposition, reducer_for
from .weyl import WeylElement, build_ghat_k

PREFACTOR = "2*pi*i*(2*pi*hbar)^n"


# ---------------------------------------------------------------------------
# P_k as formal words
# ---------------------------------------------------------------------------

@cache
def pk_words(k: int, deg: int) -> tuple[tuple[int, ...], ...]:
    """Words (r_1, ..., r_l) with g_{r_1} ... g_{r_l} in P_k, from P_k = sum_r g_r P_{k-r}."""
    if k < 0:
        return ()
    if k == 0:
        return ((),)
    out = []
    for r in range(1, min(deg, k) + 1):
        out.extend((r,) + w for w in pk_words(k - r, deg))
    return tuple(out)


def pk_permutation_sum(k: int, deg: int) -> tuple[tuple[int, ...], ...]:
    """All distinct orderings of every multiset {r_i} with sum r_i = k, r_i <= deg."""
    from itertools import permutations

    out = set()

    def parts(rem, mx):
        if rem == 0:
            yield ()
            return
        for r in range(min(rem, mx), 0, -1):
            for rest in parts(rem - r, r):
                yield (r,) + rest

    for multiset in parts(k, deg):
        out.update(permutations(multiset))
    return tuple(sorted(out))


def word_str(word: tuple[int, ...]) -> str:
    if not word:
        return "1"
    out = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        run = j - i
        out.append(f"g{word[i]}" + (f"^{run}" if run > 1 else ""))
        i = j
    return "*".join(out)


# ---------------------------------------------------------------------------
# affine symbol operators and forms
# ---------------------------------------------------------------------------

class AffineForm:
    """sum_j a_j dx dp / (H - E)^j with a_j polynomial in x, p over Q(E)."""

    def __init__(self, H: MultiPoly, pieces: dict | None = None):
        self.H = H
        self.pieces = {j: a for j, a in (pieces or {}).items() if a}

    def __add__(self, other: AffineForm):
        out = dict(self.pieces)
        for j, a in other.pieces.items():
            out[j] = out[j] + a if j in out else a
        return AffineForm(self.H, out)

    def scale(self, c):
        return AffineForm(self.H, {j: a.scale(c) for j, a in self.pieces.items()})

    @classmethod
    def polynomial(cls, H: MultiPoly, a: MultiPoly) -> AffineForm:
        return cls(H, {0: a})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: AffineForm) -> AffineForm:
        out: dict = {}
        for j1, a1 in self.pieces.items():
            for j2, a2 in other.pieces.items():
                v = a1 * a2
                out[j1 + j2] = out[j1 + j2] + v if j1 + j2 in out else v
        return AffineForm(self.H, out)

    def is_zero(self) -> bool:
        """True when sum_j a_j/(H - E)^j vanishes as a rational function."""
        if not self.pieces:
            return True
        top = max(self.pieces)
        u = self.H - MultiPoly.constant(self.H.nvars, RationalFunction.E(), self.H.names)
        total = MultiPoly.zero(self.H.nvars, self.H.names)
        for j, a in self.pieces.items():
            total = total + a * (u ** (top - j))
        return not total

    def diff_x(self, slot: int) -> AffineForm:
        """d/d(affine variable ``slot``) of the whole form (any slot, x or p)."""
        Hx = self.H.diff(slot)
        out: dict = {}
        for j, a in self.pieces.items():
            da = a.diff(slot)
            if da:
                out[j] = out[j] + da if j in out else da
            if Hx:
                t = (a * Hx).scale(-j)
                if t:
                    out[j + 1] = out[j + 1] + t if j + 1 in out else t
        return AffineForm(self.H, out)

    def max_pole(self) -> int:
        return max(self.pieces) if self.pieces else 0

    def homogenize(self, X: Hypersurface) -> RationalForm:
        pieces = {}
        for j, a in self.pieces.items():
            pieces[j] = homogenize_to_degree(a, X.piece_degree(j)).with_names(X.f.names)
        return RationalForm(X, pieces, check=False)


@dataclass
class SymbolOperator:
    """g~_r: a list of (multiplier a, x-derivative multi-index) meaning a/(H - E) d_x^beta; times i^ipow."""

    r: int
    terms: list = field(default_factory=list)
    ipow: int = 0

    def apply(self, form: AffineForm) -> AffineForm:
        out = AffineForm(form.H)
        for a, beta in self.terms:
            g = form
            for slot, b in enumerate(beta):
                for _ in range(b):
                    g = g.diff_x(slot)
            pieces = {j + 1: a * p for j, p in g.pieces.items()}
            out = out + AffineForm(form.H, pieces)
        return out

    def is_zero(self) -> bool:
        return not self.terms


def build_gk_symbols(H: MultiPoly) -> list[SymbolOperator]:
    """[g~_1, ..., g~_deg H] (real parts); g_r = i^(-r) g~_r."""
    n = H.nvars // 2
    deg = H.total_degree()
    out = []
    for r in range(1, deg + 1):
        op = SymbolOperator(r, [], (-r) % 4)
        for beta in _compositions(r, n):
            idx = [0] * (2 * n)
            xidx = [0] * (2 * n)
            for i, b in enumerate(beta):
                idx[2 * i + 1] = b
                xidx[2 * i] = b
            c = H.diff_multi(idx)
            if c:
                mult = 1
                for b in beta:
                    mult *= factorial(b)
                # sum over |beta| = r of (1/r!) * multinomial(r; beta) d^r H / dp^beta d_x^beta
                coef = Fraction(1, mult)
                op.terms.append((c.scale(-coef), tuple(xidx)))
        out.append(op)
    return out


def _compositions(k: int, n: int):
    if n == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, n - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# the trace coefficients
# ---------------------------------------------------------------------------

@dataclass
class SeriesCoefficient:
    """[hbar^k] of the trace, as i^ipow * decomposition, with ``prefactor`` not folded in."""

    k: int
    decomposition: CohomologyDecomposition
    ipow: int = 0
    prefactor: str = PREFACTOR

    def vector(self) -> list[RationalFunction]:
        return self.decomposition.vector()

    def is_zero(self) -> bool:
        return self.decomposition.is_zero()


class TraceSeries:
    """Trace-series machinery on the hypersurface of a Hamiltonian."""

    def __init__(self, H: MultiPoly, X: Hypersurface | None = None):
        self.H = H
        self.n = H.nvars // 2
        self.X = X or Hypersurface.from_hamiltonian(H)
        self.deg = self.X.D
        self._ghat: dict[int, WeylElement] = {}
        self._sigma: dict[int, MatrixFamily] = {}
        self._rows: dict[tuple, RowFamily] = {}

    def prefactor_text(self) -> str:
        return PREFACTOR.replace("^n", f"^{self.n}")

    # -- starting class -----------------------------------------------------
    def start_exponent(self) -> tuple:
        return (self.deg - self.X.N,) + (0,) * (self.X.N - 1)

    def start_numerator(self) -> MultiPoly:
        return MultiPoly.monomial(self.start_exponent(), 1, self.X.f.names)

    def start_has_pole_at_infinity(self) -> bool:
        return self.deg < self.X.N

    def start_form(self) -> RationalForm:
        return RationalForm(self.X, {1: self.start_numerator()}, check=False)

    # -- operators ----------------------------------------------------------
    def ghat(self, j: int) -> WeylElement:
        if j not in self._ghat:
            self._ghat[j] = build_ghat_k(self.X.f, j)
        return self._ghat[j]

    def sigma_ghat(self, j: int) -> MatrixFamily:
        if j not in self._sigma:
            self._sigma[j] = engine_for(self.X).sigma(self.ghat(j))
        return self._sigma[j]

    def _amax(self, j: int) -> tuple:
        w = self.ghat(j)
        out = [0] * self.X.N
        for _, a, _ in w.terms:
            out = [max(x, y) for x, y in zip(out, a)]
        return tuple(out)

    def _budget(self, weight: int) -> tuple:
        """Componentwise upper bound on how much d-order the remaining operators can remove."""
        memo = {0: (0,) * self.X.N}
        for w in range(1, weight + 1):
            best = (0,) * self.X.N
            for j in range(1, min(w, self.deg) + 1):
                if self.ghat(j).is_zero():
                    continue
                cand = tuple(a + b for a, b in zip(self._amax(j), memo[w - j]))
                best = tuple(max(x, y) for x, y in zip(best, cand))
            memo[w] = best
        return memo[weight]

    def row(self, k: int, K: int, cap: tuple) -> RowFamily:
        """u-hat sigma(P_k), pruned to d-indices that can still reach ``cap`` by order K."""
        key = (k, K, cap)
        hit = self._rows.get(key)
        if hit is not None:
            return hit
        if k == 0:
            res = RowFamily.unit(self.X)
        else:
            budget = tuple(b + c for b, c in zip(self._budget(K - k), cap))

            def keep(beta):
                return all(x <= y for x, y in zip(beta, budget))

            res = RowFamily(self.X, {}, k)
            for j in range(1, min(k, self.deg) + 1):
                if self.ghat(j).is_zero():
                    continue
                prev = self.row(k - j, K, cap)
                res = res + prev.diamond(self.sigma_ghat(j), keep)
        self._rows[key] = res
        return res

    def trace_coefficient(self, k: int) -> SeriesCoefficient:
        """Exact decomposition of [hbar^k] on the classical period basis."""
        X = self.X
        X.require_smooth()
        if self.start_has_pole_at_infinity():
            if k < self.n + 1:
                raise UnsupportedCase(
                    f"the classical form has a pole at infinity; order k = {k} < n + 1 = {self.n + 1} "
                    "would need the codimension-two extension of the reduction"
                )
            return self.trace_coefficient_direct(k)
        q = GradedPolynomial(X, {1: self.start_numerator()}, check=False)
        cap = self.start_exponent()
        row = self.row(k, k, cap)
        out = mu_apply_row(row, q)
        dec = reducer_for(X).reduce(psi(out))
        return SeriesCoefficient(k, dec, row.ipow if not dec.is_zero() else 0)

    # -- direct word application -------------------------------------------
    def apply_word_direct(self, word: tuple[int, ...], q: MultiPoly) -> tuple[MultiPoly, int]:
        """hat g_{r_1} ... hat g_{r_l} q on numerators (real part, power of i)."""
        ipow = 0
        for r in reversed(word):
            g, ip = self.ghat(r).real_part_ipow()
            q = g.apply(q)
            ipow += ip
        return q, ipow % 4

    def pk_direct(self, k: int, q: MultiPoly | None = None) -> tuple[MultiPoly, int]:
        """P_k applied directly (no matrix representation) to the start numerator."""
        q = self.start_numerator() if q is None else q
        total = MultiPoly.zero(self.X.N, self.X.f.names)
        ipow = None
        for word in pk_words(k, self.deg):
            if any(self.ghat(r).is_zero() for r in word):
                continue
            p, ip = self.apply_word_direct(word, q)
            sign = 1
            if ipow is None:
                ipow = ip
            elif ip != ipow:
                if (ip - ipow) % 2:
                    raise ValueError("mixed parity of i in P_k")  # pragma: no cover
                sign = -1
            total = total + (p if sign == 1 else -p)
        return total, (ipow or 0)

    def graded_direct(self, k: int) -> tuple[GradedPolynomial, int]:
        p, ipow = self.pk_direct(k)
        return GradedPolynomial.from_polynomial(self.X, p), ipow

    def trace_coefficient_direct(self, k: int) -> SeriesCoefficient:
        """[hbar^k] by applying P_k to the start numerator and reducing (no sigma)."""
        p, ipow = self.pk_direct(k)
        if p.has_negative_exponents():
            raise GradeError(f"P_{k} applied to the start form still has a pole at infinity")
        g = GradedPolynomial.from_polynomial(self.X, p)
        dec = reducer_for(self.X).reduce(psi(g))
        # fold i^2 = -1 so that ipow is 0 or 1
        if ipow >= 2:
            dec = dec.scale(-1)
            ipow -= 2
        return SeriesCoefficient(k, dec, ipow if not dec.is_zero() else 0)

    # -- affine pathway ----------------------------------------------------
    def start_affine(self) -> AffineForm:
        return AffineForm(self.H, {1: MultiPoly.constant(self.H.nvars, 1, self.H.names)})

    def pk_affine(self, k: int) -> tuple[AffineForm, int]:
        return pk_affine(self.H, k)


def pk_affine(H: MultiPoly, k: int) -> tuple[AffineForm, int]:
    """P_k(1/(H - E)) as an affine form (real part, power of i), word by word."""
    ops = build_gk_symbols(H)
    total = AffineForm(H)
    ipow0 = None
    for word in pk_words(k, H.total_degree()):
        form = AffineForm(H, {1: MultiPoly.constant(H.nvars, 1, H.names)})
        ip = 0
        for r in reversed(word):
            form = ops[r - 1].apply(form)
            ip += ops[r - 1].ipow
        if not form.pieces:
            continue
        ip %= 4
        if ipow0 is None:
            ipow0 = ip
        total = total + (form if ip == ipow0 else form.scale(-1))
    return total, (ipow0 or 0)


def trace_coefficient(H: MultiPoly, k: int) -> SeriesCoefficient:
    return TraceSeries(H).trace_coefficient(k)


# ---------------------------------------------------------------------------
# star products and the resolvent symbol
# ---------------------------------------------------------------------------
#
# A symbol series is a dict k -> AffineForm for the coefficient of hbar~^k,
# hbar~ = hbar / i.  Working in hbar~ keeps every coefficient real.

def _dmulti(form: AffineForm, idx) -> AffineForm:
    for slot, b in enumerate(idx):
        for _ in range(b):
            form = form.diff_x(slot)
    return form


def star_product_truncated(A: dict, B: dict, K: int) -> dict:
    """A * B = sum_beta hbar~^|beta| / beta! (d_x^beta A)(d_p^beta B), truncated after hbar~^K."""
    out: dict = {}
    for ka, a in A.items():
        for kb, b in B.items():
            for extra in range(K - ka - kb + 1):
                n = a.H.nvars // 2
                for beta in _compositions(extra, n):
                    xi = [0] * (2 * n)
                    pi = [0] * (2 * n)
                    den = 1
                    for i, x in enumerate(beta):
                        xi[2 * i] = x
                        pi[2 * i + 1] = x
                        den *= factorial(x)
                    da = _dmulti(a, xi)
                    if not da.pieces:
                        continue
                    db = _dmulti(b, pi)
                    if not db.pieces:
                        continue
                    term = (da * db).scale(Fraction(1, den))
                    k = ka + kb + extra
                    out[k] = out[k] + term if k in out else term
    return {k: v for k, v in out.items() if v.pieces}


def resolvent_symbol(H: MultiPoly, K: int) -> dict:
    """R = sum_k hbar^k P_k(1/(H - E)) as hbar~-coefficients (hbar^k = i^k hbar~^k)."""
    out = {}
    for k in range(K + 1):
        form, ipow = pk_affine(H, k)
        # hbar^k i^ipow = hbar~^k i^(k + ipow); k + ipow is even by construction
        tot = (k + ipow) % 4
        if tot % 2:
            raise ValueError("odd phase in the resolvent symbol")  # pragma: no cover
        out[k] = form if tot == 0 else form.scale(-1)
    return out


def resolvent_symbol_check(H: MultiPoly, K: int) -> bool:
    """R * (H - E) == 1 + O(hbar^(K+1)), exactly."""
    R = resolvent_symbol(H, K)
    HE = AffineForm.polynomial(H, H - MultiPoly.constant(H.nvars, RationalFunction.E(), H.names))
    prod = star_product_truncated(R, {0: HE}, K)
    one = AffineForm.polynomial(H, MultiPoly.constant(H.nvars, 1, H.names))
    for k in range(K + 1):
        got = prod.get(k, AffineForm(H))
        if not (got - one if k == 0 else got).is_zero():
            return False
    return True


def quantization_transform(series: dict, s, K: int) -> dict:
    """exp(-(1 - s) hbar~ sum_j d_xj d_pj) applied to a hbar~-series, truncated after hbar~^K."""
    s = Fraction(s)
    c = -(1 - s)
    out: dict = {}
    for k0, a in series.items():
        term = a
        for l in range(K - k0 + 1):
            if l:
                nxt = AffineForm(a.H)
                n = a.H.nvars // 2
                for i in range(n):
                    nxt = nxt + term.diff_x(2 * i).diff_x(2 * i + 1)
                term = nxt.scale(Fraction(1, l) * c)
            if not term.pieces:
                break
            k = k0 + l
            out[k] = out[k] + term if k in out else term
    return out


def quantization_transform_check(H: MultiPoly, s, K: int) -> bool:
    """The resolvent symbol of another s-quantization differs by exact forms at every order <= K."""
    n = H.nvars // 2
    for i in range(n):
        if H.diff(2 * i).diff(2 * i + 1):
            raise ValueError(f"d^2 H / dx{i + 1} dp{i + 1} must vanish for the quantization comparison")
    R = resolvent_symbol(H, K)
    Rs = quantization_transform(R, s, K)
    X = Hypersurface.from_hamiltonian(H)
    red = reducer_for(X)
    for k in range(K + 1):
        diff = Rs.get(k, AffineForm(H)) - R.get(k, AffineForm(H))
        if diff.pieces and 0 in diff.pieces:
            return False
        if diff.pieces and not red.reduce(diff.homogenize(X)).is_zero():
            return False
    return True
