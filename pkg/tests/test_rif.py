import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pickcert import rif as R
from pickcert.errors import ArgumentError, DominationError, SingularPointError, StabilityError
from pickcert.geometry import AnalyticDisc, MobiusMap
from pickcert.polynomial import MultiPoly, reflect

Z1 = MultiPoly.variable(2, 0)
Z2 = MultiPoly.variable(2, 1)
Q = 2 - Z1 - Z2
SINGULAR = R.make_rif(1, (1, 1), Q)
DIAGONAL = AnalyticDisc.flat([1])


def _coeffs_equal(g, expected, tol=1e-12):
    # g = num/den normalised by den(0) = 1
    c0 = g.den.coeff((0,))
    n = max(g.num.total_degree(), expected.num.total_degree(), g.den.total_degree(), expected.den.total_degree())
    for k in range(n + 1):
        assert abs(g.num.coeff((k,)) / c0 - expected.num.coeff((k,))) <= tol
        assert abs(g.den.coeff((k,)) / c0 - expected.den.coeff((k,))) <= tol


class TestConstruction:
    def test_coordinate_function(self):
        f = R.make_rif(1, (1, 0, 0), MultiPoly.constant(3))
        assert R.eval_rif(f, (0.3 + 0.1j, 0.7, -0.2)) == 0.3 + 0.1j

    def test_numerator_is_tau_times_reflection(self):
        assert SINGULAR.numerator == 2 * Z1 * Z2 - Z1 - Z2
        f = R.make_rif(1j, (1, 1), Q)
        assert f.numerator == reflect(Q, (1, 1)).scale(1j)

    def test_constant(self):
        f = R.make_rif(1, (0, 0), MultiPoly.constant(2))
        assert R.eval_rif(f, (0.5, 0.5)) == 1 and R.degree(f) == 0

    def test_rejects_non_unimodular_tau(self):
        with pytest.raises(ArgumentError):
            R.make_rif(0.5, (0, 0), MultiPoly.constant(2))

    def test_rejects_unstable(self):
        with pytest.raises(StabilityError):
            R.make_rif(1, (1, 0), Z1 - 0.5)

    def test_rejects_undominated(self):
        with pytest.raises(DominationError):
            R.make_rif(1, (0, 1), Q)

    def test_from_fraction(self):
        f = R.rif_from_fraction(2 * Z1 * Z2 - Z1 - Z2, Q)
        assert f.d == (1, 1) and f.q == Q

    def test_from_fraction_rejects_non_rudin(self):
        with pytest.raises(ArgumentError):
            R.rif_from_fraction(Z1 + 0.1, Q)


class TestEval:
    def test_origin(self):
        assert R.eval_rif(SINGULAR, (0, 0)) == 0

    def test_half(self):
        assert R.eval_rif(SINGULAR, (0.5, 0.5)) == pytest.approx(-0.5, abs=1e-15)

    def test_singular_point(self):
        with pytest.raises(SingularPointError):
            R.eval_rif(SINGULAR, (1, 1))

    def test_outside_polydisc(self):
        with pytest.raises(ArgumentError):
            R.eval_rif(SINGULAR, (1.5, 0))

    def test_modulus_bound(self):
        for seed in range(25):
            rng = np.random.default_rng(seed)
            f = R.random_rif(rng, 2, int(rng.integers(1, 5)))
            pts = np.sqrt(rng.uniform(size=(100, 2))) * np.exp(2j * np.pi * rng.uniform(size=(100, 2)))
            assert np.max(np.abs(R.eval_rif_many(f, pts))) <= 1 + 1e-12


class TestDegree:
    def test_values(self):
        assert R.degree(R.coordinate_function(2)) == 1
        assert R.degree(SINGULAR) == 2
        assert R.degree(R.constant_rif(3)) == 0


class TestRestrict:
    def test_monomial_on_diagonal(self):
        g = R.restrict(R.make_rif(1, (1, 1), MultiPoly.constant(2)), DIAGONAL)
        assert g.degree == 2
        assert g(0.5) == pytest.approx(0.25)

    def test_singular_on_diagonal_is_minus_z(self):
        g = R.restrict(SINGULAR, DIAGONAL)
        expected = R.OneVarRational(MultiPoly.from_coeffs([0, -1]), MultiPoly.constant(1), True)
        _coeffs_equal(g, expected)
        assert g.inner

    def test_coordinate_on_mobius_graph(self):
        g = R.restrict(R.coordinate_function(2), AnalyticDisc.mobius_graph(MobiusMap(1j, 0.2 - 0.1j)))
        z = np.array([0.1, -0.3j, 0.5 + 0.2j])
        np.testing.assert_allclose(g(z), z, atol=1e-14)

    def test_commutes_with_evaluation(self):
        rng = np.random.default_rng(11)
        discs = [AnalyticDisc.flat([cmath.exp(1j * x)]) for x in (0.3, 2.0, -1.1)]
        discs.append(AnalyticDisc.mobius_graph(MobiusMap(cmath.exp(0.4j), 0.3 + 0.2j)))
        for _ in range(5):
            f = R.random_rif(rng, 2, int(rng.integers(1, 4)))
            for disc in discs:
                g = R.restrict(f, disc)
                z = 0.95 * np.sqrt(rng.uniform(size=50)) * np.exp(2j * np.pi * rng.uniform(size=50))
                direct = np.array([R.eval_rif(f, disc(w)) for w in z])
                assert np.max(np.abs(g(z) - direct)) <= 1e-10

    def test_degree_monotone(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            f = R.random_rif(rng, 2, int(rng.integers(1, 5)))
            disc = AnalyticDisc.flat([cmath.exp(2j * math.pi * rng.uniform())])
            assert R.restrict(f, disc).degree == R.degree(f)

    def test_degree_monotone_singular(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            f = R.random_rif(rng, 2, int(rng.integers(1, 5)), singular_prob=0.5)
            assert R.restrict(f, DIAGONAL).degree <= R.degree(f)

    def test_three_variables(self):
        f = R.random_rif(np.random.default_rng(3), 3, 3)
        disc = AnalyticDisc.flat([1j, -1])
        g = R.restrict(f, disc)
        assert g(0.4) == pytest.approx(R.eval_rif(f, disc(0.4)), abs=1e-12)


class TestDiscDegree:
    def test_double_zero(self):
        assert R.disc_degree(R.make_rif(1, (1, 1), MultiPoly.constant(2)), DIAGONAL) == 2

    def test_drop_at_singularity(self):
        assert R.disc_degree(SINGULAR, DIAGONAL) == 1 < R.degree(SINGULAR)

    def test_constant(self):
        assert R.disc_degree(R.constant_rif(2, -1), AnalyticDisc.flat([1j])) == 0


class TestPullback:
    def test_pullback_is_rudin(self):
        f = R.random_rif(np.random.default_rng(4), 3, 3)
        disc = AnalyticDisc.coordinate_pairing(3, cmath.exp(0.7j))
        h = R.pullback(f, disc)
        pt = (0.3, -0.2 + 0.4j)
        assert R.eval_rif(h, pt) == pytest.approx(R.eval_rif(f, disc(pt)), abs=1e-13)
        assert R.validate_inner(h).max_torus_defect <= 1e-9


class TestValidateInner:
    def test_coordinate_function(self):
        rep = R.validate_inner(R.coordinate_function(2))
        assert rep.max_torus_defect <= 4 * np.finfo(float).eps

    def test_singular_excluding_neighbourhood(self):
        rep = R.validate_inner(SINGULAR, R.InnerSample(angles=64))
        assert rep.max_torus_defect <= 1e-9
        assert rep.excluded_points >= 1

    def test_constant(self):
        rep = R.validate_inner(R.constant_rif(2))
        assert rep.max_interior_modulus == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4), st.sampled_from([0.0, 0.5]))
def test_random_rifs_are_inner(seed, deg, singular):
    f = R.random_rif(np.random.default_rng(seed), 2, deg, singular_prob=singular)
    rep = R.validate_inner(f, R.InnerSample(angles=32, interior=20, seed=seed))
    assert rep.max_torus_defect <= 1e-9
    assert rep.max_interior_modulus <= 1 + 1e-12
