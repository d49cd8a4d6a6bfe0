"""Buchberger's algorithm with cofactor tracking, normal forms and quotient bases.

Everything is over Q(E).  Every basis element carries its expression in the
original generators, so a normal form also yields an explicit ideal
decomposition ``q = sum_j a_j g_j + r``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations

from .errors import SingularHypersurface
from .poly import MultiPoly
from .ratfunc import ONE, RationalFunction

Exponent = tuple[int, ...]


class MonomialOrder:
    """Graded reverse lexicographic or graded lexicographic order.

    ``priority`` lists variable indices from most to least significant.  The
    default priority ``(0, 1, ..., N-1)`` means z0 > z1 > ... > z_{N-1}.
    """

    def __init__(self, nvars: int, kind: str = "grevlex", priority: tuple[int, ...] | None = None):
        if kind not in ("grevlex", "glex"):
            raise ValueError(f"unknown monomial order {kind!r}")
        self.nvars = nvars
        self.kind = kind
        self.priority = tuple(priority) if priority is not None else tuple(range(nvars))
        if sorted(self.priority) != list(range(nvars)):
            raise ValueError("priority must be a permutation of the variable indices")
        rev = tuple(reversed(self.priority))
        if kind == "grevlex":
            self.key = lambda e: (sum(e), tuple(-e[v] for v in rev))
        else:
            pr = self.priority
            self.key = lambda e: (sum(e), tuple(e[v] for v in pr))

    def leading(self, p: MultiPoly) -> tuple[Exponent, RationalFunction]:
        e = max(p.terms, key=self.key)
        return e, p.terms[e]

    def sort_desc(self, exps):
        return sorted(exps, key=self.key, reverse=True)

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.priority) == (other.kind, other.priority)

    def __hash__(self):
        return hash((self.kind, self.priority))

    def __repr__(self):
        return f"MonomialOrder({self.kind}, priority={self.priority})"


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


@dataclass
class _Tracked:
    poly: MultiPoly
    cof: list  # list[MultiPoly], one per original generator


def _combine(dst: dict, src: dict, exp: Exponent, c: RationalFunction):
    """dst += c * z^exp * src, in place on raw term dicts."""
    for e, v in src.items():
        ne = tuple(a + b for a, b in zip(e, exp))
        w = dst.get(ne)
        nv = v * c
        if w is None:
            dst[ne] = nv
        else:
            nv = w + nv
            if nv:
                dst[ne] = nv
            else:
                del dst[ne]


class GroebnerBasis:
    """A reduced Groebner basis together with cofactors in the original generators."""

    def __init__(self, gens: list[MultiPoly], order: MonomialOrder, elems: list[_Tracked]):
        self.gens = list(gens)
        self.order = order
        self.nvars = order.nvars
        self.polys = [t.poly for t in elems]
        self.cofactors = [t.cof for t in elems]
        self.leads = []
        self.lead_coeffs = []
        for p in self.polys:
            e, c = order.leading(p)
            self.leads.append(e)
            self.lead_coeffs.append(c)
        # tails pre-divided by the leading coefficient: g/lc = z^lead + tail
        self._tails = []
        for p, e, c in zip(self.polys, self.leads, self.lead_coeffs):
            inv = c.inverse()
            self._tails.append({x: v * inv for x, v in p.terms.items() if x != e})
        self._nf_cache: dict = {}

    def __len__(self):
        return len(self.polys)

    def divisor_index(self, exp: Exponent) -> int | None:
        for k, le in enumerate(self.leads):
            if _divides(le, exp):
                return k
        return None

    def is_standard(self, exp: Exponent) -> bool:
        return self.divisor_index(exp) is None

    # -- normal forms -------------------------------------------------------
    def _reduce_terms(self, terms: dict, track: bool):
        """Core division loop.  Returns (remainder dict, quotients per basis element)."""
        key = self.order.key
        work = dict(terms)
        heap = [(_neg_key(key(e)), e) for e in work]
        heapq.heapify(heap)
        rem: dict = {}
        quots = [dict() for _ in self.polys] if track else None
        while heap:
            _, e = heapq.heappop(heap)
            c = work.pop(e, None)
            if c is None or not c:
                continue
            k = self.divisor_index(e)
            if k is None:
                rem[e] = c
                continue
            shift = _sub(e, self.leads[k])
            if track:
                qc = c * self.lead_coeffs[k].inverse()
                q = quots[k]
                w = q.get(shift)
                q[shift] = qc if w is None else w + qc
            for te, tv in self._tails[k].items():
                ne = tuple(a + b for a, b in zip(te, shift))
                nv = -(tv * c)
                w = work.get(ne)
                if w is None:
                    work[ne] = nv
                    heapq.heappush(heap, (_neg_key(key(ne)), ne))
                else:
                    nv = w + nv
                    if nv:
                        work[ne] = nv
                    else:
                        del work[ne]
        return rem, quots

    def normal_form(self, q: MultiPoly) -> MultiPoly:
        out: dict = {}
        for e, c in q.terms.items():
            nf = self._nf_cache.get(e)
            if nf is None:
                nf, _ = self._reduce_terms({e: ONE}, False)
                self._nf_cache[e] = nf
            for x, v in nf.items():
                w = out.get(x)
                nv = v * c
                if w is None:
                    out[x] = nv
                else:
                    nv = w + nv
                    if nv:
                        out[x] = nv
                    else:
                        del out[x]
        return MultiPoly(q.nvars, out, q.names, _clean=True)

    def normal_form_with_cofactors(self, q: MultiPoly) -> tuple[MultiPoly, list[MultiPoly]]:
        """Return (r, [a_0, ..]) with q = sum_j a_j * gens[j] + r, r standard."""
        rem, quots = self._reduce_terms(q.terms, True)
        ng = len(self.gens)
        acc = [dict() for _ in range(ng)]
        for k, qk in enumerate(quots):
            if not qk:
                continue
            for j in range(ng):
                cof = self.cofactors[k][j]
                if not cof:
                    continue
                for shift, c in qk.items():
                    _combine(acc[j], cof.terms, shift, c)
        cofs = [MultiPoly(q.nvars, a, q.names, _clean=True) for a in acc]
        return MultiPoly(q.nvars, rem, q.names, _clean=True), cofs

    def contains(self, q: MultiPoly) -> bool:
        return self.normal_form(q).is_zero()

    def is_zero_dimensional(self) -> bool:
        pure = set()
        for e in self.leads:
            nz = [i for i, a in enumerate(e) if a]
            if len(nz) == 1:
                pure.add(nz[0])
        return len(pure) == self.nvars


def _neg_key(k):
    # heapq is a min-heap; invert the order key to pop the largest monomial first
    deg, rest = k
    return (-deg, tuple(-x for x in rest))


def buchberger(gens: list[MultiPoly], order: MonomialOrder | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens`` (cofactors tracked)."""
    gens = [g for g in gens]
    if not gens:
        raise ValueError("need at least one generator")
    nvars = gens[0].nvars
    if order is None:
        order = MonomialOrder(nvars)
    names = gens[0].names
    zero = MultiPoly.zero(nvars, names)

    def unit(j):
        return [MultiPoly.constant(nvars, 1, names) if i == j else zero for i in range(len(gens))]

    elems: list[_Tracked] = [_Tracked(g, unit(j)) for j, g in enumerate(gens) if g]

    def reduce_full(t: _Tracked, basis: list[_Tracked]) -> _Tracked:
        tmp = GroebnerBasis(gens, order, basis) if basis else None
        if tmp is None:
            return t
        rem, quots = tmp._reduce_terms(t.poly.terms, True)
        cof = [dict(c.terms) for c in t.cof]
        for k, qk in enumerate(quots):
            for shift, c in qk.items():
                for j in range(len(gens)):
                    src = basis[k].cof[j]
                    if src:
                        _combine(cof[j], src.terms, shift, -c)
        return _Tracked(
            MultiPoly(nvars, rem, names, _clean=True),
            [MultiPoly(nvars, c, names, _clean=True) for c in cof],
        )

    # initial inter-reduction keeps the pair set small
    basis: list[_Tracked] = []
    for t in sorted(elems, key=lambda t: order.key(order.leading(t.poly)[0])):
        r = reduce_full(t, basis)
        if r.poly:
            basis.append(r)

    def lead(t):
        return order.leading(t.poly)

    pairs = [(i, j) for i, j in combinations(range(len(basis)), 2)]
    while pairs:
        pairs.sort(key=lambda ij: order.key(_lcm(lead(basis[ij[0]])[0], lead(basis[ij[1]])[0])))
        i, j = pairs.pop(0)
        ei, ci = lead(basis[i])
        ej, cj = lead(basis[j])
        L = _lcm(ei, ej)
        # product criterion
        if all(a == 0 or b == 0 for a, b in zip(ei, ej)):
            continue
        si, sj = _sub(L, ei), _sub(L, ej)
        ai, aj = ci.inverse(), -cj.inverse()
        poly_terms: dict = {}
        _combine(poly_terms, basis[i].poly.terms, si, ai)
        _combine(poly_terms, basis[j].poly.terms, sj, aj)
        cof = []
        for c1, c2 in zip(basis[i].cof, basis[j].cof):
            d: dict = {}
            _combine(d, c1.terms, si, ai)
            _combine(d, c2.terms, sj, aj)
            cof.append(MultiPoly(nvars, d, names, _clean=True))
        s = _Tracked(MultiPoly(nvars, poly_terms, names, _clean=True), cof)
        r = reduce_full(s, basis)
        if r.poly:
            basis.append(r)
            m = len(basis) - 1
            pairs.extend((k, m) for k in range(m))

    # minimalize
    minimal = []
    for idx, t in enumerate(basis):
        e = lead(t)[0]
        if any(
            _divides(lead(u)[0], e) and (lead(u)[0] != e or jdx < idx)
            for jdx, u in enumerate(basis)
            if jdx != idx
        ):
            continue
        minimal.append(t)
    # make monic, then fully inter-reduce
    monic = []
    for t in minimal:
        c = lead(t)[1].inverse()
        monic.append(_Tracked(t.poly.scale(c), [x.scale(c) for x in t.cof]))
    reduced = []
    for idx, t in enumerate(monic):
        others = [u for jdx, u in enumerate(monic) if jdx != idx]
        e, _ = lead(t)
        head = _Tracked(MultiPoly.monomial(e, 1, names), [zero] * len(gens))
        tail = _Tracked(t.poly - head.poly, t.cof)
        rt = reduce_full(tail, others) if others else tail
        reduced.append(_Tracked(rt.poly + head.poly, rt.cof))
    reduced.sort(key=lambda t: order.key(lead(t)[0]))
    return GroebnerBasis(gens, order, reduced)


@dataclass(frozen=True)
class QuotientBasis:
    """Standard monomials e_1 = 1, e_2, ... sorted increasingly in the monomial order."""

    monomials: tuple
    order: MonomialOrder = field(compare=False)

    @property
    def d(self) -> int:
        return len(self.monomials)

    def index(self, exp: Exponent) -> int:
        return self.monomials.index(tuple(exp))


def quotient_basis(gb: GroebnerBasis) -> QuotientBasis:
    """Standard monomials of a zero-dimensional ideal; raises SingularHypersurface otherwise."""
    if not gb.is_zero_dimensional():
        raise SingularHypersurface("Jacobian ideal is not zero-dimensional: the hypersurface is singular")
    nv = gb.nvars
    start = (0,) * nv
    if not gb.is_standard(start):
        # the ideal is the whole ring: f has no points at all; treat as degenerate
        raise SingularHypersurface("Jacobian ideal is the unit ideal")
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for e in frontier:
            for i in range(nv):
                ne = e[:i] + (e[i] + 1,) + e[i + 1:]
                if ne not in seen and gb.is_standard(ne):
                    seen.add(ne)
                    nxt.append(ne)
        frontier = nxt
    mons = tuple(sorted(seen, key=gb.order.key))
    return QuotientBasis(mons, gb.order)


def jacobian(f: MultiPoly) -> list[MultiPoly]:
    return [f.diff(i) for i in range(f.nvars)]


def jacobian_basis(f: MultiPoly, order: MonomialOrder | None = None) -> GroebnerBasis:
    return buchberger(jacobian(f), order or MonomialOrder(f.nvars))


def smoothness_check(f: MultiPoly, order: MonomialOrder | None = None) -> str:
    """'smooth' or 'singular' for a homogeneous polynomial f."""
    if not f.is_homogeneous():
        raise ValueError("smoothness_check expects a homogeneous polynomial")
    gens = [g for g in jacobian(f) if g]
    if not gens:
        return "singular"
    gb = buchberger(gens, order or MonomialOrder(f.nvars))
    try:
        quotient_basis(gb)
    except SingularHypersurface:
        return "singular"
    return "smooth"


def specialize(f: MultiPoly, value, order: MonomialOrder | None = None) -> MultiPoly:
    """Substitute E = value and re-check smoothness (raises SingularHypersurface)."""
    g = f.subs_E(value)
    if smoothness_check(g, order) != "smooth":
        raise SingularHypersurface(f"hypersurface is singular at E = {value}")
    return g
