import random
from fractions import Fraction

import pytest

from qperiods.errors import InhomogeneousElement
from qperiods.poly import MultiPoly
from qperiods.ratfunc import RationalFunction
from qperiods.weyl import MhatRational, WeylElement, build_ghat_k, mhat_grade

N, D = 3, 3
W = WeylElement
z = [W.z(N, D, i) for i in range(N)]
d = [W.d(N, D, i) for i in range(N)]
one = W.one(N, D)


def test_canonical_commutation():
    for i in range(N):
        for j in range(N):
            comm = d[i] * z[j] - z[j] * d[i]
            assert comm == (one if i == j else W.zero(N, D))


def test_leibniz_normal_ordering():
    assert d[1] ** 2 * z[1] ** 2 == z[1] ** 2 * d[1] ** 2 + (z[1] * d[1]).scale(4) + one.scale(2)


def test_localized_product():
    inv = W.scalar(N, D, MhatRational.inv_linear(0))
    a = inv * W.monomial((3, 0, 0), (0, 1, 0), D)
    got = a * inv
    want = W.monomial((3, 0, 0), (0, 1, 0), D, MhatRational.inv_linear(0) * MhatRational.inv_linear(Fraction(-2, 3)))
    assert got == want


def test_shift_commutes_past_inverse():
    S = W.shift_op(N, D)
    inv = W.scalar(N, D, MhatRational.inv_linear(0))
    assert S * inv == W.scalar(N, D, MhatRational.inv_linear(-1)) * S
    assert inv * S == S * W.scalar(N, D, MhatRational.inv_linear(1))


def test_mhat_grades():
    assert mhat_grade(W.monomial((3, 0, 0), (0, 1, 0), D)) == Fraction(2, 3)
    assert mhat_grade(W.shift_op(N, D)) == 1


def _random_element(rng, localized=False):
    out = W.zero(N, D)
    for _ in range(2):
        a = tuple(rng.randint(0, 2) for _ in range(N))
        b = tuple(rng.randint(0, 1) for _ in range(N))
        c = MhatRational.const(rng.randint(-3, 3) or 1)
        if localized:
            c = c * MhatRational.inv_linear(Fraction(rng.randint(0, 3), 3)) * MhatRational.mhat()
        out = out + W.monomial(a, b, D, c, rng.randint(0, 1) if localized else 0)
    return out


@pytest.mark.parametrize("localized", [False, True])
def test_associativity(localized):
    rng = random.Random(11)
    for _ in range(15):
        a, b, c = (_random_element(rng, localized) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_action_is_a_module_structure():
    rng = random.Random(5)
    names = ["z0", "z1", "z2"]
    for _ in range(20):
        a, b = _random_element(rng), _random_element(rng)
        p = MultiPoly(N, {tuple(rng.randint(0, 3) for _ in range(N)): RationalFunction(rng.randint(1, 4)) for _ in range(3)}, names)
        assert (a * b).apply(p) == a.apply(b.apply(p))


def test_mhat_expanded_acts_as_grade(cubic):
    mh = W.mhat_expanded(N, D)
    q = MultiPoly.monomial((1, 1, 1), 1, cubic.f.names)
    assert mh.apply(q) == q.scale(2)


def test_ghat_matches_closed_forms(cubic):
    f = cubic.f
    mh = W.mhat_expanded(N, D)
    f1 = W.from_poly(f.diff(1), D)
    g1 = (z[0] ** 3 * z[2] * (d[1] - f1 * mh)).times_i(1)
    delta = z[0] * (d[1] - f1 * mh)
    g2 = (z[0] ** 3 * delta * delta).scale(Fraction(1, 2))
    assert build_ghat_k(f, 1) == g1
    assert build_ghat_k(f, 2) == g2
    assert build_ghat_k(f, 3).is_zero()


def test_ghat1_action_by_hand(cubic):
    f = cubic.f
    g1, ipow = build_ghat_k(f, 1).real_part_ipow()
    assert ipow == 1
    z0, z2 = MultiPoly.var(3, 0, f.names), MultiPoly.var(3, 2, f.names)
    for e in [(0, 0, 0), (2, 1, 0), (1, 1, 1), (0, 0, 3)]:
        q = MultiPoly.monomial(e, 1, f.names)
        m = Fraction(sum(e) + 3, 3)
        want = (z0**3 * z2) * (q.diff(1) - (f.diff(1) * q).scale(m))
        assert g1.apply(q) == want


def test_ghat_is_inhomogeneous(cubic):
    g1 = build_ghat_k(cubic.f, 1)
    assert g1.mhat_grades() == {Fraction(1), Fraction(2)}
    with pytest.raises(InhomogeneousElement):
        mhat_grade(g1)


def test_complex_parts_do_not_mix():
    with pytest.raises(ValueError):
        z[0] + z[1].times_i(1)
    with pytest.raises(ValueError):
        z[0].times_i(1).apply(MultiPoly.var(3, 0))
