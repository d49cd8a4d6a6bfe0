import random

import pytest

from qperiods.errors import GradeError, UnsupportedCase
from qperiods.forms import GradedPolynomial, RationalForm, phi, psi
from qperiods.parse import parse_homogeneous
from qperiods.poly import MultiPoly
from qperiods.ratfunc import RationalFunction
from qperiods.reduction import (
    d_dE,
    derivative_classes,
    normalize_ode,
    picard_fuchs,
    r_gd,
    reduce_to_normal_form,
)

E = RationalFunction.E()
ONE_CLASS = (1, (0, 0, 0))
Z1Z2SQ = (2, (0, 1, 2))


def form(X, pieces):
    return RationalForm(X, {m: parse_homogeneous(t, 3) for m, t in pieces.items()})


def test_cohomology_basis(cubic):
    assert cubic.cohomology_basis == (ONE_CLASS, Z1Z2SQ)


def test_first_derivative_reduction(cubic):
    a = d_dE(RationalForm.omega_over_f(cubic))
    assert a == form(cubic, {2: "z0^3"})
    dec = reduce_to_normal_form(a)
    assert dec.vector() == [9 / (2 * (4 - 27 * E)), -1 / (E * (27 * E - 4))]
    # a single simultaneous step already reaches the normal form here
    assert r_gd(a) == dec.to_form()


def test_second_derivative_reduction(cubic):
    a = d_dE(RationalForm.omega_over_f(cubic), 2)
    assert a == form(cubic, {3: "2*z0^6"})
    expected = [3 * (189 * E - 4) / (4 * (4 - 27 * E) ** 2 * E), 2 * (27 * E - 2) / ((4 - 27 * E) ** 2 * E**2)]
    assert reduce_to_normal_form(a).vector() == expected
    assert r_gd(r_gd(a)) == reduce_to_normal_form(a).to_form()


def test_picard_fuchs_first_period(cubic):
    ode = picard_fuchs(RationalForm.omega_over_f(cubic))
    assert ode.order == 2
    assert ode.highest_first() == normalize_ode([15, 8 * (27 * E - 2), 4 * (27 * E**2 - 4 * E)])[::-1]


def test_picard_fuchs_second_period_verified_form(cubic):
    # the relation actually satisfied by the periods of z1 z2^2 Omega/f^2
    a = RationalForm.omega_over_f(cubic, parse_homogeneous("z1*z2^2", 3), 2)
    ode = picard_fuchs(a)
    assert ode.highest_first() == (108 * E**2 - 16 * E, 108 * E, RationalFunction(-3))
    vecs = [c.vector() for c in derivative_classes(a, 3)]
    assert all(not v for v in ode.apply(vecs))


def test_ode_invariant_rejects_perturbation(cubic):
    a = RationalForm.omega_over_f(cubic)
    ode = picard_fuchs(a)
    vecs = [c.vector() for c in derivative_classes(a, 3)]
    bad = type(ode)((ode.coefficients[0] + 1,) + ode.coefficients[1:])
    assert any(bad.apply(vecs))


def test_normalize_ode_is_scale_invariant():
    c = [RationalFunction(15), 8 * (27 * E - 2), 4 * (27 * E**2 - 4 * E)]
    assert normalize_ode(c) == normalize_ode([x * (E - 7) / 3 for x in c])
    assert normalize_ode([-x for x in c]) == normalize_ode(c)


def test_exact_forms_reduce_to_zero(cubic):
    # d(...) style exact combination: a_j f_j / f^m - (1/(m-1)) d_j a_j / f^(m-1)
    rng = random.Random(3)
    f = cubic.f
    for _ in range(10):
        j = rng.randrange(3)
        e = [0, 0, 0]
        for _ in range(2):
            e[rng.randrange(3)] += 1
        a = MultiPoly.monomial(tuple(e), RationalFunction(rng.randint(1, 5)) + E, f.names)
        exact = RationalForm(cubic, {3: a * f.diff(j), 2: a.diff(j).scale(RationalFunction(-1) / 2)}, check=False)
        assert reduce_to_normal_form(exact).is_zero()


def test_reduction_is_linear(cubic):
    a = form(cubic, {2: "z0^3 + z1^2*z2"})
    b = form(cubic, {3: "z0^6 - z1^3*z2^3"})
    ra, rb = reduce_to_normal_form(a), reduce_to_normal_form(b)
    assert reduce_to_normal_form(a + b.scale(E)) == ra + rb.scale(E)


def test_phi_is_a_section_of_psi(cubic):
    a = form(cubic, {3: "z0^6 + z1^3*z0^2*z2", 2: "z1*z2^2"}) + RationalForm(
        cubic, {2: cubic.f * MultiPoly.monomial((0, 0, 0), 1, cubic.f.names)}, check=False
    )
    g = phi(a)
    assert psi(g) == a
    assert phi(psi(g)) == g


def test_grade_validation(cubic):
    with pytest.raises(GradeError):
        RationalForm(cubic, {2: parse_homogeneous("z0^2", 3)})
    with pytest.raises(GradeError):
        GradedPolynomial(cubic, {1: parse_homogeneous("z0", 3)})


def test_pole_at_infinity_is_refused(cubic):
    bad = RationalForm(cubic, {2: MultiPoly.monomial((-1, 2, 2), 1, cubic.f.names)}, check=False)
    with pytest.raises(UnsupportedCase):
        reduce_to_normal_form(bad)
