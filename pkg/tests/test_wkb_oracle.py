from fractions import Fraction

import pytest

from qperiods.errors import QPeriodsError, SingularHypersurface
from qperiods.parse import parse_hamiltonian, parse_homogeneous
from qperiods.poly import MultiPoly
from qperiods.ratfunc import RationalFunction
from qperiods.wkb_oracle import (
    PhaseScalar,
    SExpr,
    WKBSeries,
    lift_scalar,
    oracle_coefficient,
    oracle_form,
    potential_of,
    residue_lift,
)

from .conftest import CUBIC, QUARTIC

E = RationalFunction.E()


@pytest.fixture(scope="module")
def V():
    return potential_of(parse_hamiltonian(CUBIC))


def poly(text):
    return parse_hamiltonian(text, 1)


def test_low_orders(V):
    W = WKBSeries(V)
    Vx, Vxx = V.diff(0), V.diff(0, 2)
    sc, e = W.dphi_dE(0)
    assert (sc.c, sc.e, sc.k) == (1, 1, 0)
    assert e.terms == {-1: MultiPoly.constant(2, Fraction(1, 2), V.names)}
    sc, e = W.dphi_dE(1)
    assert (sc.c, sc.e, sc.k) == (1, 0, 1)
    assert e.terms == {-4: Vx.scale(Fraction(1, 4))}
    # -3V''/(16 sqrt2 s^5) - 25 V'^2/(64 sqrt2 s^7) with sqrt2 * (i/sqrt2)^2 = -1/sqrt2
    sc, e = W.dphi_dE(2)
    assert (sc.c, sc.e, sc.k) == (Fraction(-1, 2), 1, 0)
    assert e.terms == {-5: Vxx.scale(Fraction(3, 16)), -7: (Vx * Vx).scale(Fraction(25, 64))}


def test_riccati_residual(V):
    W = WKBSeries(V)
    assert W.riccati_ok(5)
    quartic = WKBSeries(potential_of(parse_hamiltonian(QUARTIC)))
    assert quartic.riccati_ok(5)


def test_riccati_residual_detects_errors(V):
    W = WKBSeries(V)
    W.chi_r(3)
    W.chi[2] = W.chi[2] + SExpr(W.V, {-5: MultiPoly.constant(2, 1, W.V.names)})
    assert not W.riccati_ok(3)


def test_parity_structure(V):
    W = WKBSeries(V)
    for r in range(6):
        dE = W.dphi_dE(r)[1]
        assert dE.odd_part_only() if r % 2 == 0 else dE.even_part_only()


def test_lift_scalars():
    assert lift_scalar(1) == PhaseScalar.make(1, 1)
    assert lift_scalar(3) == PhaseScalar.make(Fraction(8, 3), 1)
    assert lift_scalar(4) == PhaseScalar.make(Fraction(-16, 5), 1)


def test_integer_poles_have_no_lift(V):
    W = WKBSeries(V)
    with pytest.raises(QPeriodsError):
        residue_lift(*W.dphi_dE(1), W.H)


def test_hbar2_lift_is_the_residue_form(V, cubic):
    phase, form = oracle_form(V, 2)
    assert phase == PhaseScalar.make(1)
    Vx, Vxx = V.diff(0), V.diff(0, 2)
    assert form.pieces == {4: (Vx * Vx).scale(Fraction(5, 4)), 3: Vxx.scale(Fraction(-1, 2))}
    hom = form.homogenize(cubic)
    assert hom.pieces[4] == parse_homogeneous("5/4*z0^5*z1^2*(2*z0+3*z1)^2", 3)
    assert hom.pieces[3] == parse_homogeneous("-z0^5*(z0+3*z1)", 3)


def test_oracle_values(V, cubic):
    assert oracle_coefficient(V, 0, cubic).vector() == [RationalFunction(1), RationalFunction()]
    assert oracle_coefficient(V, 3, cubic).is_zero()
    assert oracle_coefficient(V, 2, cubic).vector() == [
        (135 * E + 4) / (16 * (27 * E - 4) ** 2 * E),
        (1215 * E**2 - 180 * E + 16) / (48 * (27 * E - 4) ** 2 * E**2),
    ]


def test_odd_orders_are_exact(V, cubic):
    # the odd terms are total x-derivatives, so their lift is never needed; check
    # the stronger statement that d phi_1/dE = d/dx of a rational function
    W = WKBSeries(V)
    expr = W.dphi_dE(1)[1]
    prim = SExpr(W.V, {-2: MultiPoly.constant(2, Fraction(1, 4), W.V.names)})
    assert (prim.dx() - expr).is_zero()


def test_quartic_oracle_needs_a_smooth_model():
    with pytest.raises(SingularHypersurface):
        oracle_coefficient(potential_of(parse_hamiltonian(QUARTIC)), 2)


def test_potential_shape_is_checked():
    with pytest.raises(ValueError):
        potential_of(parse_hamiltonian("p1^2 + x1^3", 1))
    with pytest.raises(ValueError):
        potential_of(parse_hamiltonian("1/2*p1^2 + x1*p1", 1))
