from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cayley_billiards.cayley import (
    cayley_condition,
    cayley_matrix,
    minor_degree,
    minor_system,
    taylor_coeffs,
    taylor_coeffs_from_r,
)
from cayley_billiards.confocal import Ellipsoid, MergedSpectrum, existence_check
from cayley_billiards.ratpoly import Poly, elementary_symmetric

from oracles import m2_factors, m3_factors, sqrt_product_series

gamma_triples = st.lists(st.fractions(min_value=F(1, 20), max_value=20, max_denominator=20),
                         min_size=3, max_size=3, unique=True).map(lambda v: sorted(v, reverse=True))


class TestTaylor:
    def test_3_2_1(self):
        assert taylor_coeffs([3, 2, 1], 3).coeffs == (1, -3, 1, 0)

    def test_9_4_1(self):
        f = taylor_coeffs([9, 4, 1], 5).coeffs
        assert f[3:] == (-18, -126, -882)

    @given(st.lists(st.fractions(min_value=F(1, 9), max_value=9, max_denominator=9),
                    min_size=3, max_size=5, unique=True))
    def test_against_binomial_product(self, gs):
        if len(gs) % 2 == 0:
            gs = gs[:-1]
        s = taylor_coeffs(gs, 7)
        assert s.exact
        assert list(s.coeffs) == sqrt_product_series(gs, 7)
        assert s[1] == -elementary_symmetric(gs, 1) / 2

    def test_float_mirror(self):
        exact = taylor_coeffs([F(9), F(4), F(1)], 6).coeffs
        approx = taylor_coeffs([9.0, 4.0, 1.0], 6).coeffs
        assert [float(v) for v in exact] == pytest.approx(approx, rel=1e-14)

    def test_from_r_requires_unit_constant(self):
        with pytest.raises(ValueError):
            taylor_coeffs_from_r(Poly([2, 1]), 3)


def test_matrix_corners():
    m, n = 5, 3
    s = taylor_coeffs(list(range(5, 0, -1)), 2 * m - 1)
    mat = cayley_matrix(s, m, n)
    assert mat.shape == (m - 1, m - n + 1)
    e = mat.entries
    assert e[0][0] == s[m + 1] and e[0][-1] == s[n + 1]
    assert e[-1][0] == s[2 * m - 1] and e[-1][-1] == s[m + n - 1]
    assert mat.hankel()[0][0] == s[n + 1]


class TestCondition:
    def test_planar_minimal(self):
        v = cayley_condition(MergedSpectrum.from_gammas([3, 2, 1]), 2)
        assert v.holds and v.rank == 0 and v.exact

    def test_spatial_minimal(self):
        assert cayley_condition(MergedSpectrum.from_gammas([6, 5, 4, 2, 1]), 3)

    def test_period_three_planar(self):
        spec = MergedSpectrum.from_gammas([9, 4, 1])
        assert cayley_condition(spec, 3)
        assert not cayley_condition(spec, 2)

    def test_period_below_dimension(self):
        with pytest.raises(ValueError, match="elliptic period below dimension"):
            cayley_condition(MergedSpectrum.from_gammas([6, 5, 4, 2, 1]), 2)

    def test_poly_input_matches_spectrum(self):
        spec = MergedSpectrum.from_gammas([9, 4, 1])
        R = Poly.from_roots([0, 9, 4, 1])
        for m in (2, 3, 4):
            assert cayley_condition(R, m).holds == cayley_condition(spec, m).holds

    def test_float_diagnostic_agrees(self):
        e = Ellipsoid([0.2, 0.5, 1.0])
        spec = MergedSpectrum.from_caustics(e, existence_check(e, [1 / 6, 1 / 4]))
        v = cayley_condition(spec, 3)
        assert v.holds and not v.exact
        assert not cayley_condition(spec, 4).holds


class TestMinors:
    @given(gamma_triples)
    def test_m2_factorization(self, g):
        assert -16 * minor_system(g, 2, 1) == m2_factors(*g)

    @given(gamma_triples)
    def test_m3_factorization(self, g):
        assert -16384 * minor_system(g, 3, 1) == m3_factors(*g)

    def test_vanishes_on_minimal_example(self):
        assert minor_system([3, 2, 1], 2, 1) == 0

    @given(st.lists(st.fractions(min_value=F(1, 5), max_value=5, max_denominator=5),
                    min_size=5, max_size=5, unique=True),
           st.fractions(min_value=F(1, 3), max_value=3, max_denominator=4),
           st.integers(3, 4), st.integers(1, 2))
    def test_homogeneity(self, gs, sigma, m, l):
        gs = sorted(gs, reverse=True)
        base = minor_system(gs, m, l)
        scaled = minor_system([sigma * g for g in gs], m, l)
        assert scaled == sigma ** minor_degree(m, 3, l) * base

    def test_index_range(self):
        with pytest.raises(ValueError):
            minor_system([3, 2, 1], 2, 2)
