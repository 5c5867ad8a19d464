import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pickcert.errors import ArgumentError, DominationError
from pickcert.polynomial import (
    MultiPoly,
    StabilityGrid,
    add,
    compose_univariate,
    eval_many,
    eval_poly,
    grlex_key,
    is_stable,
    multiply,
    poly_from_roots,
    reflect,
    roots_1d,
    scalar_multiply,
)

Z1 = MultiPoly.variable(2, 0)
Z2 = MultiPoly.variable(2, 1)
Q = 2 - Z1 - Z2

coeffs = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def dominated_poly(draw, nvars=2, max_deg=3):
    d = tuple(draw(st.integers(0, max_deg)) for _ in range(nvars))
    exps = [e for e in np.ndindex(*(k + 1 for k in d))]
    chosen = draw(st.lists(st.sampled_from(exps), min_size=1, max_size=len(exps), unique=True))
    return MultiPoly(nvars, {e: draw(coeffs) for e in chosen}), d


class TestEval:
    def test_constant_term(self):
        assert eval_poly(Q, (0, 0)) == 2

    def test_cancellation_at_one(self):
        assert eval_poly(Q, (1, 1)) == 0

    def test_product_at_i(self):
        assert eval_poly(Z1 * Z2, (1j, 1j)) == -1

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            eval_poly(Q, (0, 0, 0))

    def test_eval_many_matches_scalar(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(20, 2)) + 1j * rng.normal(size=(20, 2))
        p = Q * Z1 + 3j * Z2 ** 3
        np.testing.assert_allclose(eval_many(p, pts), [eval_poly(p, z) for z in pts], rtol=1e-13)


class TestArithmetic:
    def test_product_of_variables(self):
        assert multiply(Z1, Z2) == MultiPoly.monomial((1, 1))

    def test_cancellation_prunes(self):
        s = add(Q, Z1 + Z2)
        assert s == MultiPoly.constant(2, 2)
        assert set(s.terms) == {(0, 0)}

    def test_compose_square_with_dilation(self):
        z = MultiPoly.from_coeffs([0, 1])
        assert compose_univariate(z ** 2, z.scale(3)) == MultiPoly.from_coeffs([0, 0, 9])

    def test_scalar_multiply(self):
        assert scalar_multiply(Q, 0.5) == 1 - 0.5 * Z1 - 0.5 * Z2

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            Z1 + MultiPoly.variable(3, 0)

    def test_degree_additive(self):
        assert (Q * Q * Z1).total_degree() == 3

    def test_relative_pruning(self):
        p = MultiPoly(1, {(0,): 1.0, (1,): 1e-15})
        assert p.terms.keys() == {(0,)}

    def test_terms_read_only(self):
        with pytest.raises(TypeError):
            Q.terms[(5, 5)] = 1

    def test_grlex_order(self):
        exps = [e for e, _ in (Q * Z1).sorted_terms()]
        assert exps == sorted(exps, key=grlex_key)
        assert exps[0] == (1, 0)


class TestReflect:
    def test_constant(self):
        assert reflect(MultiPoly.constant(2), (0, 0)) == MultiPoly.constant(2)

    def test_worked_example(self):
        assert reflect(Q, (1, 1)) == 2 * Z1 * Z2 - Z1 - Z2

    def test_domination_error(self):
        with pytest.raises(DominationError):
            reflect(Z1 ** 2, (1, 1))

    @given(dominated_poly())
    def test_involution(self, pd):
        p, d = pd
        assert reflect(reflect(p, d), d) == p

    @settings(max_examples=50)
    @given(dominated_poly(), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
    def test_modulus_on_torus(self, pd, a, b):
        p, d = pd
        zeta = (cmath.exp(1j * a), cmath.exp(1j * b))
        assert abs(abs(eval_poly(reflect(p, d), zeta)) - abs(eval_poly(p, zeta))) <= 1e-12


class TestRoots:
    def test_linear(self):
        np.testing.assert_allclose(roots_1d(MultiPoly.from_coeffs([-0.5, 1])), [0.5])

    def test_quadratic(self):
        r = np.sort_complex(roots_1d(MultiPoly.from_coeffs([1, -20, 1])))
        np.testing.assert_allclose(r, [10 - math.sqrt(99), 10 + math.sqrt(99)], rtol=1e-14)

    def test_constant_has_no_roots(self):
        assert roots_1d(MultiPoly.constant(1, 3)).size == 0

    def test_zero_polynomial(self):
        with pytest.raises(ArgumentError):
            roots_1d(MultiPoly(1, {}))

    @settings(max_examples=100)
    @given(st.lists(coeffs, min_size=2, max_size=9))
    def test_reconstruction(self, cs):
        if abs(cs[-1]) < 1e-3:
            cs[-1] = 1.0
        p = MultiPoly.from_coeffs(cs)
        rebuilt = poly_from_roots(roots_1d(p), leading=cs[-1])
        err = np.max(np.abs(rebuilt.to_coeffs() - p.to_coeffs()))
        assert err <= 1e-8


class TestStability:
    def test_constant(self):
        rep = is_stable(MultiPoly.constant(2))
        assert rep.stable and rep.min_modulus == 1

    def test_interior_zero(self):
        assert not is_stable(MultiPoly.from_coeffs([-0.5, 1])).stable
        assert not is_stable(Z1 - 0.5).stable

    def test_boundary_zero_is_stable(self):
        rep = is_stable(Q)
        assert rep.stable and rep.min_modulus > 0
        assert rep.boundary_min_modulus < 1e-12

    def test_witness_in_closed_polydisc(self):
        rep = is_stable(Z1 * Z2 - 0.25)
        assert not rep.stable
        assert all(abs(w) <= 1 for w in rep.witness)

    def test_grid_cap(self):
        grid = StabilityGrid(max_points=10 ** 4)
        rep = is_stable(MultiPoly.constant(3), grid)
        assert rep.grid_resolution["points"] <= 10 ** 4

    def test_zero_polynomial(self):
        with pytest.raises(ArgumentError):
            is_stable(MultiPoly(2, {}))

    def test_univariate_exact(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            deg = int(rng.integers(1, 7))
            cs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            p = MultiPoly.from_coeffs(cs)
            expected = bool(np.all(np.abs(np.roots(cs[::-1])) >= 1 - 1e-7))
            assert is_stable(p).stable == expected
