from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as F
from itertools import combinations
from math import prod

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cayley_billiards.ratpoly import (
    Poly,
    elementary_symmetric,
    poly_gcd,
    poly_sqrt,
    rank_exact,
    rank_float,
    real_roots,
    squarefree_decomposition,
    sturm_chain,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


class TestElementarySymmetric:
    @pytest.mark.parametrize("l, want", [(0, 1), (1, 6), (2, 11), (3, 6), (4, 0)])
    def test_small_values(self, l, want):
        assert elementary_symmetric([3, 2, 1], l) == want

    @given(st.lists(fractions, min_size=0, max_size=6))
    def test_matches_literal_product(self, xs):
        # brute force over subsets is an independent oracle for the expansion
        expanded = Poly([1])
        for x in xs:
            expanded = expanded * Poly([1, x])
        for l in range(len(xs) + 2):
            brute = sum((prod(c) for c in combinations(xs, l)), F(0)) if l <= len(xs) else 0
            assert elementary_symmetric(xs, l) == brute
            assert expanded[l] == brute


class TestPolyArithmetic:
    def test_zero_is_canonical(self):
        assert Poly([0, 0]).coeffs == ()
        assert Poly([1, 2, 0]).degree == 1

    @given(st.lists(fractions, min_size=1, max_size=6), st.lists(fractions, min_size=1, max_size=4))
    def test_divmod_identity(self, a, b):
        p, q = Poly(a), Poly(b)
        if q.is_zero():
            return
        quo, rem = divmod(p, q)
        assert quo * q + rem == p
        assert rem.is_zero() or rem.degree < q.degree

    def test_gcd_of_shared_factor(self):
        p = Poly.from_roots([1, 2, F(1, 3)])
        q = Poly.from_roots([2, F(1, 3), 5])
        assert poly_gcd(p, q) == Poly.from_roots([2, F(1, 3)])

    def test_squarefree_decomposition(self):
        p = Poly.from_roots([1, 1, 1, 2, 2, 3])
        parts = {m: g for g, m in squarefree_decomposition(p)}
        assert parts[3] == Poly.from_roots([1])
        assert parts[2] == Poly.from_roots([2])
        assert parts[1] == Poly.from_roots([3])

    def test_reversed_and_rescale(self):
        p = Poly([1, 2, 3])
        assert p.reversed() == Poly([3, 2, 1])
        assert p.reversed(4) == Poly([0, 0, 3, 2, 1])
        assert p.rescale_variable(2) == Poly([1, 4, 12])

    def test_poly_sqrt(self):
        q = Poly.from_roots([F(1, 2), 3])
        root, rem = poly_sqrt(q * q)
        assert rem.is_zero() and root == q
        _, rem = poly_sqrt(q * q + Poly([1]))
        assert not rem.is_zero()

    def test_sturm_chain_ends_constant(self):
        ch = sturm_chain(Poly.from_roots([1, 2, 4]))
        assert ch[-1].degree == 0


class TestRealRoots:
    def test_factored_quadratic(self):
        assert real_roots(Poly([2, -3, 1])) == [(1, 1), (2, 1)]

    def test_linear_tangency_root(self):
        # t^2 - (t-2)(t-1) = 3t - 2
        p = Poly.monomial(2) - Poly.from_roots([2, 1])
        assert p == Poly([-2, 3])
        assert real_roots(p) == [(F(2, 3), 1)]

    def test_double_root(self):
        assert real_roots(Poly.from_roots([5, 5])) == [(5, 2)]

    def test_zero_polynomial(self):
        with pytest.raises(ValueError, match="undefined root set"):
            real_roots(Poly([]))

    def test_no_real_roots(self):
        assert real_roots(Poly([1, 0, 1])) == []

    def test_interval_is_open(self):
        p = Poly.from_roots([1, 2, 3])
        assert real_roots(p, (1, 3)) == [(2, 1)]
        assert real_roots(p, (0, None)) == [(1, 1), (2, 1), (3, 1)]

    def test_irrational_root_width(self):
        roots = real_roots(Poly([-2, 0, 1]))
        assert len(roots) == 2
        r = roots[1][0]
        assert abs(float(r) - 2 ** 0.5) < 2 ** -55

    @given(st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=9), min_size=1, max_size=6))
    def test_recovers_rational_roots_exactly(self, rs):
        p = Poly.from_roots(rs)
        want = sorted((r, rs.count(r)) for r in set(rs))
        assert real_roots(p) == want

    def test_float_path_clusters_multiple_roots(self):
        p = Poly.from_roots([1.0, 1.0, 3.0])
        got = real_roots(p)
        assert [m for _, m in got] == [2, 1]
        assert abs(got[0][0] - 1.0) < 1e-7 and abs(got[1][0] - 3.0) < 1e-12

    def test_thread_safe(self):
        polys = [Poly.from_roots([k, k + 1, F(1, k + 2)]) for k in range(1, 20)]
        serial = [real_roots(p) for p in polys]
        with ThreadPoolExecutor(4) as pool:
            assert list(pool.map(real_roots, polys)) == serial


class TestRank:
    def test_examples(self):
        assert rank_exact([[1, 2], [2, 4]]) == 1
        assert rank_exact([[0]]) == 0

    def test_cayley_block_for_9_4_1(self):
        # f3, f4, f5 of sqrt((1-9t)(1-4t)(1-t)) computed by hand from the squaring recursion
        f3, f4, f5 = -18, -126, -882
        assert f4 * f4 - f3 * f5 == 0
        assert rank_exact([[f4, f3], [f5, f4]]) == 1

    def test_rational_entries(self):
        assert rank_exact([[F(1, 2), F(1, 3)], [F(3, 2), 1]]) == 1
        assert rank_exact([[F(1, 2), F(1, 3)], [F(3, 2), F(1, 7)]]) == 2

    def test_empty_matrix_rejected(self):
        with pytest.raises(ValueError):
            rank_exact([])

    @given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 8), st.integers(0, 2**32 - 1))
    def test_agrees_with_svd(self, r, c, k, seed):
        g = np.random.default_rng(seed)
        k = min(k, r, c)
        a = g.integers(-9, 10, size=(r, k)) @ g.integers(-9, 10, size=(k, c)) if k else np.zeros((r, c), int)
        ref = np.linalg.matrix_rank(a.astype(float), tol=1e-9 * max(1.0, np.abs(a).max()) * max(r, c))
        assert rank_exact(a.tolist()) == ref
        assert rank_float(a) == ref
