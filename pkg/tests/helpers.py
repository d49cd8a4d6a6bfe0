"""Shared builders for randomized matrix-representation tests."""

import random

from qperiods.forms import GradedPolynomial, psi
from qperiods.matrix_rep import RowFamily, engine_for, mu_apply_row
from qperiods.poly import MultiPoly
from qperiods.ratfunc import RationalFunction
from qperiods.reduction import reducer_for
from qperiods.weyl import WeylElement

E = RationalFunction.E()


def random_coefficient(rng):
    return RationalFunction(rng.randint(-4, 4) or 1) + E * rng.randint(-2, 2)


def random_weyl(rng, N, D, max_a=2, max_b=2, terms=2):
    out = WeylElement.zero(N, D)
    for _ in range(terms):
        a = tuple(rng.randint(0, max_a) for _ in range(N))
        b = tuple(rng.randint(0, max_b) for _ in range(N))
        out = out + WeylElement.monomial(a, b, D, rng.randint(-3, 3) or 1)
    return out


def random_graded(rng, X, grades=(1, 2, 3), terms=3):
    """Random q with homogeneous pieces of degree m*D - N for the given grades."""
    pieces = {}
    for m in grades:
        deg = X.piece_degree(m)
        if deg < 0:
            continue
        acc = MultiPoly.zero(X.N, X.f.names)
        for _ in range(terms):
            e = [0] * X.N
            for _ in range(deg):
                e[rng.randrange(X.N)] += 1
            acc = acc + MultiPoly.monomial(tuple(e), random_coefficient(rng), X.f.names)
        if acc:
            pieces[m] = acc
    return GradedPolynomial(X, pieces)


def grade_zero_letters(X):
    """Grade-preserving generators z_i d_j plus z0^D, which raises the grade by one."""
    N, D = X.N, X.D
    out = []
    for i in range(N):
        for j in range(N):
            out.append(WeylElement.z(N, D, i) * WeylElement.d(N, D, j))
    out.append(WeylElement.z(N, D, 0, D))
    return out


def apply_direct(word, q):
    """psi-side numerator of w_1 ... w_l q (real part, total power of i)."""
    X = q.X
    p = q.total()
    ipow = 0
    for w in reversed(word):
        real, ip = w.real_part_ipow()
        p = real.apply(p)
        ipow += ip
    return GradedPolynomial.from_polynomial(X, p), ipow % 4


def apply_mu(word, q, families):
    """mu(sigma(w_1) <> ... <> sigma(w_l), q) via the alpha = 0 row."""
    row = RowFamily.unit(q.X)
    for w in word:
        row = row.diamond(families(w))
    return mu_apply_row(row, q), row.ipow


def sigma_cache(X):
    eng = engine_for(X)
    cache = {}

    def get(w):
        key = id(w)
        if key not in cache:
            cache[key] = (w, eng.sigma(w))
        return cache[key][1]

    return get


def same_class(X, a, ia, b, ib):
    red = reducer_for(X)
    ra = red.reduce(psi(a))
    rb = red.reduce(psi(b))
    if (ia - ib) % 4 == 2:
        rb = -rb
    elif ia % 4 != ib % 4 and not (ra.is_zero() and rb.is_zero()):
        return False
    return ra == rb


def rng(seed):
    return random.Random(seed)
