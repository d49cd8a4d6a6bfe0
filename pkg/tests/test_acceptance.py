"""The fourteen acceptance criteria, one test each, all at zero tolerance.

Each test records its outcome; the terminal summary prints one PASS/FAIL line
per criterion (see conftest.py).
"""

from contextlib import contextmanager
from fractions import Fraction

import pytest

from qperiods.errors import UnsupportedCase
from qperiods.forms import RationalForm
from qperiods.matrix_rep import MatrixFamily, sigma, z_matrices
from qperiods.parse import parse_hamiltonian, parse_homogeneous, parse_tpoly
from qperiods.poly import MultiPoly
from qperiods.ratfunc import RationalFunction
from qperiods.reduction import derivative_classes, normalize_ode, picard_fuchs
from qperiods.trace_series import (
    TraceSeries,
    pk_permutation_sum,
    pk_words,
    quantization_transform_check,
    resolvent_symbol_check,
)
from qperiods.weyl import WeylElement
from qperiods.wkb_oracle import WKBSeries, oracle_coefficient, potential_of

from .conftest import ACCEPTANCE, CUBIC, HARMONIC_1, HARMONIC_2, QUARTIC
from .helpers import (
    apply_direct,
    apply_mu,
    grade_zero_letters,
    random_graded,
    random_weyl,
    rng,
    same_class,
    sigma_cache,
)

E = RationalFunction.E()

# sign of the first [hbar^2] coefficient, fixed by the WKB oracle (see test 5)
XI2 = [(135 * E + 4) / (16 * (27 * E - 4) ** 2 * E), (1215 * E**2 - 180 * E + 16) / (48 * (27 * E - 4) ** 2 * E**2)]


@contextmanager
def criterion(n, title):
    ok = False
    try:
        yield
        ok = True
    finally:
        ACCEPTANCE[n] = (ok, title)
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")


def proportional(a, b):
    return normalize_ode(list(a)) == normalize_ode(list(b))


def test_c01_homogenization(cubic):
    with criterion(1, "cubic homogenization f"):
        assert cubic.f == parse_homogeneous("1/2*z2^2*z0 + z1^2*z0 + z1^3 - E*z0^3", 3)


def test_c02_quotient_basis(cubic):
    with criterion(2, "quotient basis, d = 8"):
        want = {"1", "z2", "z1", "z0", "z2^2", "z1*z2", "z1^2", "z1*z2^2"}
        got = {str(MultiPoly.monomial(e, 1, cubic.f.names)) for e in cubic.basis.monomials}
        assert got == want and cubic.d == 8


def test_c03_picard_fuchs_first(cubic):
    with criterion(3, "Picard-Fuchs for Omega/f"):
        a = RationalForm.omega_over_f(cubic)
        ode = picard_fuchs(a)
        assert proportional(ode.coefficients, [RationalFunction(15), 8 * (27 * E - 2), 4 * (27 * E**2 - 4 * E)])
        vecs = [c.vector() for c in derivative_classes(a, 3)]
        assert all(not v for v in ode.apply(vecs))


def test_c04_picard_fuchs_second(cubic):
    with criterion(4, "Picard-Fuchs for z1*z2^2 Omega/f^2"):
        a = RationalForm.omega_over_f(cubic, parse_homogeneous("z1*z2^2", 3), 2)
        ode = picard_fuchs(a)
        assert proportional(ode.coefficients, [RationalFunction(3), 135 * E + 4, 6 * (27 * E**2 - 4 * E)])


def test_c05_trace_series_cubic(cubic, cubic_series):
    with criterion(5, "cubic trace series k = 1, 2, 3"):
        V = potential_of(cubic_series.H)
        # the oracle fixes the sign of the first coefficient once
        oracle = oracle_coefficient(V, 2, cubic).vector()
        assert [abs_sign(x) for x in oracle] == [abs_sign(x) for x in XI2]
        sign = 1 if oracle[0] == XI2[0] else -1
        assert oracle[0] == XI2[0] * sign and oracle[1] == XI2[1]
        assert cubic_series.trace_coefficient(1).is_zero()
        assert cubic_series.trace_coefficient(3).is_zero()
        c2 = cubic_series.trace_coefficient(2)
        assert c2.ipow == 0
        assert c2.vector() == [XI2[0] * sign, XI2[1]]


def abs_sign(x):
    # a rational function up to sign
    return frozenset({str(x), str(-x)})


def test_c06_dual_path(cubic, cubic_series):
    with criterion(6, "trace = WKB oracle, k in {0, 2, 4}, cubic and quartic"):
        V = potential_of(cubic_series.H)
        for k in (0, 2, 4):
            assert cubic_series.trace_coefficient(k).decomposition == oracle_coefficient(V, k, cubic)
        H4 = parse_hamiltonian(QUARTIC)
        T4 = TraceSeries(H4)
        V4 = potential_of(H4)
        for k in (0, 2, 4):
            assert T4.trace_coefficient(k).decomposition == oracle_coefficient(V4, k, T4.X)


def test_c07_sigma_structure(cubic, cubic_series):
    import json
    from pathlib import Path

    with criterion(7, "sigma structure, Z-matrices, sparsity 210 / 639"):
        assert sigma(WeylElement.one(3, 3), cubic) == MatrixFamily.delta(cubic)
        for gamma in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 2, 1)]:
            fam = sigma(WeylElement.monomial((0, 0, 0), gamma, 3), cubic)
            assert fam.entries == {((0, 0, 0), gamma): {(i, i): (RationalFunction(1),) for i in range(8)}}
        golden = json.loads((Path(__file__).parent / "data" / "cubic_z_matrices.json").read_text())
        for i in range(3):
            got = z_matrices(cubic, i)
            want = {
                tuple(int(x) for x in nu.split(",")): {
                    tuple(int(x) - 1 for x in ij.split(",")): parse_tpoly(t) for ij, t in m.items()
                }
                for nu, m in golden[f"Z{i}"].items()
            }
            assert got == want
        assert len(cubic_series.sigma_ghat(1).offsets()) == 210
        assert len(cubic_series.sigma_ghat(2).offsets()) == 639


def test_c08_homomorphism(cubic):
    with criterion(8, "sigma homomorphism on 50 random pairs, commutation"):
        r = rng(2024)
        for _ in range(50):
            a, b = random_weyl(r, 3, 3), random_weyl(r, 3, 3)
            assert sigma(a, cubic).diamond(sigma(b, cubic)) == sigma(a * b, cubic)
        delta = MatrixFamily.delta(cubic)
        for i in range(3):
            d, z = sigma(WeylElement.d(3, 3, i), cubic), sigma(WeylElement.z(3, 3, i), cubic)
            assert d.diamond(z) - z.diamond(d) == delta


def _soundness_cases(cubic, cubic_series, count):
    r = rng(99)
    letters = grade_zero_letters(cubic) + [cubic_series.ghat(1), cubic_series.ghat(2)]
    fams = sigma_cache(cubic)
    ghat_fams = {id(cubic_series.ghat(j)): cubic_series.sigma_ghat(j) for j in (1, 2)}

    def family(w):
        return ghat_fams.get(id(w)) or fams(w)

    for i in range(count):
        word = [r.choice(letters) for _ in range(1 + i % 2)]
        if i % 3 == 0:
            word[0] = cubic_series.ghat(1 + i % 2)
        q = random_graded(r, cubic, grades=(1, 2))
        yield word, q, family


def test_c09_integral_soundness(cubic, cubic_series):
    with criterion(9, "reduce(psi(g q)) = reduce(psi(mu(sigma(g), q))), 50 cases"):
        n = 0
        for word, q, family in _soundness_cases(cubic, cubic_series, 50):
            a, ia = apply_direct(word, q)
            b, ib = apply_mu(word, q, family)
            assert same_class(cubic, a, ia, b, ib)
            n += 1
        assert n >= 50


def test_c10_pole_bound(cubic, cubic_series):
    with criterion(10, "mu raises pole order by at most r; direct growth larger at k = 3"):
        r = cubic.pole_bound
        assert r == 2
        for word, q, family in _soundness_cases(cubic, cubic_series, 50):
            out, _ = apply_mu(word, q, family)
            if out.pieces:
                assert max(out.pieces) - max(q.pieces) <= r
        start = max(cubic_series.start_form().pieces)
        direct, _ = cubic_series.graded_direct(3)
        assert max(direct.pieces) - start > r


def test_c11_resolvent_and_quantization():
    with criterion(11, "resolvent R*(H-E) = 1 at K = 3; quantization s = 1/2, K = 2"):
        assert resolvent_symbol_check(parse_hamiltonian(CUBIC), 3)
        assert resolvent_symbol_check(parse_hamiltonian(HARMONIC_1), 3)
        assert quantization_transform_check(parse_hamiltonian(CUBIC), Fraction(1, 2), 2)


def test_c12_riccati():
    with criterion(12, "Riccati residual to order 5"):
        assert WKBSeries(potential_of(parse_hamiltonian(CUBIC))).riccati_ok(5)


def test_c13_harmonic():
    with criterion(13, "harmonic oscillator: d = 1, refusal, truncation"):
        for text, n in ((HARMONIC_1, 1), (HARMONIC_2, 2)):
            T = TraceSeries(parse_hamiltonian(text))
            assert T.X.d == 1
            for k in range(n + 1):
                with pytest.raises(UnsupportedCase, match="pole at infinity"):
                    T.trace_coefficient(k)
            for k in range(n + 1, n + 3):
                graded, _ = T.graded_direct(k)
                assert not graded.total().has_negative_exponents()
                for m, piece in graded.pieces.items():
                    assert T.X.grade_of(piece) == m


def test_c14_pk_words():
    with criterion(14, "P_k recurrence = permutation sum (k <= 6); P_1..P_4"):
        for deg in (2, 3, 4):
            for k in range(7):
                assert sorted(pk_words(k, deg)) == list(pk_permutation_sum(k, deg))
        listed = {
            1: ["1"],
            2: ["11", "2"],
            3: ["111", "12", "21"],
            4: ["1111", "112", "121", "211", "22"],
        }
        for k, ws in listed.items():
            assert sorted(pk_words(k, 2)) == sorted(tuple(int(c) for c in w) for w in ws)
