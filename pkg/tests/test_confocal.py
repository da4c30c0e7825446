import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cayley_billiards.confocal import (
    CausticError,
    Ellipsoid,
    MergedSpectrum,
    existence_check,
    format_number,
    from_elliptic,
    normalize_numbers,
    parse_number,
    to_elliptic,
    to_elliptic_many,
    type_from_label,
)


def test_parse_and_format_round_trip():
    assert parse_number("2/3") == F(2, 3)
    assert parse_number("4") == 4 and isinstance(parse_number("4"), int)
    assert parse_number("0.25") == 0.25
    assert format_number(F(2, 3)) == "2/3"
    assert format_number(F(4)) == "4"
    assert float(format_number(0.1 + 0.2)) == 0.1 + 0.2


def test_mixed_modes_rejected():
    with pytest.raises(ValueError, match="mixed"):
        normalize_numbers([F(1, 2), 0.5])
    assert normalize_numbers([1, F(1, 2)]) == [1, F(1, 2)]
    assert all(isinstance(v, float) for v in normalize_numbers([1, 0.5]))


def test_ellipsoid_validation():
    with pytest.raises(ValueError):
        Ellipsoid([1, 1])
    with pytest.raises(ValueError):
        Ellipsoid([2, 1])
    with pytest.raises(ValueError):
        Ellipsoid([0, 1])
    e = Ellipsoid.parse("1, 1/5, 1/2")
    assert e.axes == (F(1, 5), F(1, 2), F(1)) and e.exact and e.n == 3


class TestExistence:
    def test_spatial_example(self):
        cs = existence_check(Ellipsoid([F(1, 5), F(1, 2), 1]), [F(1, 6), F(1, 4)])
        assert cs.type_vector == (0, 1) and cs.label == "EH1"

    def test_outside_range(self):
        with pytest.raises(CausticError, match="no tangent trajectories exist"):
            existence_check(Ellipsoid([1, 2]), [3])

    def test_singular(self):
        with pytest.raises(CausticError, match="singular caustic"):
            existence_check(Ellipsoid([1, 2]), [1])

    def test_wrong_interval_for_index(self):
        # lambda_1 must lie below a_2
        with pytest.raises(CausticError):
            existence_check(Ellipsoid([1, 2, 3]), [F(5, 2), F(11, 4)])

    @given(st.lists(st.fractions(min_value=F(1, 50), max_value=100, max_denominator=50),
                    min_size=5, max_size=5, unique=True),
           st.lists(st.integers(0, 1), min_size=2, max_size=2))
    def test_type_vector_range(self, vals, choice):
        vals = sorted(vals)
        axes, pool = vals[::2], vals[1::2]
        e = Ellipsoid(axes)
        lams = []
        for k in range(2):
            lo = F(0) if k + choice[k] - 1 < 0 else axes[k + choice[k] - 1]
            hi = axes[k + choice[k]]
            lams.append((lo + hi) / 2)
        if lams[0] >= lams[1]:
            return
        cs = existence_check(e, lams)
        for k, s in enumerate(cs.type_vector, start=1):
            assert s in (k - 1, k)

    def test_labels(self):
        assert type_from_label("H1H2", 3) == (1, 2)
        assert type_from_label("e", 2) == (0,)


class TestMergedSpectrum:
    def test_from_caustics(self):
        e = Ellipsoid([F(1, 5), F(1, 2), 1])
        spec = MergedSpectrum.from_caustics(e, existence_check(e, [F(1, 6), F(1, 4)]))
        assert spec.gamma == (6, 5, 4, 2, 1)
        assert spec.gamma_ext[-1] == 0
        kinds = [t[0] for t in spec.tags]
        assert kinds.count("axis") == 3 and kinds.count("caustic") == 2
        assert spec.axis_positions() == [2, 4, 5]
        assert spec.oscillation_intervals() == [(0.0, 1 / 6), (0.2, 0.25), (0.5, 1.0)]

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            MergedSpectrum([1, 1, 2])


def _random_boundary_point(e, g):
    x = g.normal(size=e.n)
    a = e.float_axes()
    return x / math.sqrt(float(np.sum(x * x / a)))


class TestEllipticCoordinates:
    def test_roots_satisfy_equation(self):
        e = Ellipsoid([1, 2])
        g = np.random.default_rng(1)
        for _ in range(50):
            x = g.uniform(-0.6, 0.6, size=2)
            mu = to_elliptic(e, x).mu
            assert mu[0] < 1 < mu[1] < 2
            for m in mu:
                assert abs(sum(x[j] ** 2 / ([1, 2][j] - m) for j in range(2)) - 1) < 1e-10

    def test_boundary_point_has_mu0_zero(self):
        e = Ellipsoid([F(1, 5), F(1, 2), 1])
        x = _random_boundary_point(e, np.random.default_rng(3))
        assert abs(to_elliptic(e, x).mu[0]) < 1e-12

    def test_hyperplane_convention(self):
        # x_2 = 0: the colliding root goes to the lower slot, mu_1 = a_2
        e = Ellipsoid([1, 2])
        mu = to_elliptic(e, [math.sqrt(1 / 2), 0.0]).mu
        assert mu[0] < 1 <= mu[1] and mu[1] == pytest.approx(2.0, abs=1e-12)
        x = from_elliptic(e, mu)
        assert x == pytest.approx([math.sqrt(0.5), 0.0], abs=1e-9)

    def test_sign_reflection_invariance(self):
        e = Ellipsoid([F(1, 5), F(1, 2), 1])
        g = np.random.default_rng(5)
        x = g.uniform(-0.3, 0.3, size=3)
        ref = to_elliptic(e, x).mu
        for s in [(1, 1, -1), (-1, 1, 1), (-1, -1, -1), (1, -1, 1)]:
            assert to_elliptic(e, np.array(s) * x).mu == ref

    def test_axis_value_zeroes_coordinate(self):
        e = Ellipsoid([1, 2, 4])
        x = from_elliptic(e, [0.5, 2.0, 3.0])
        assert x[1] == 0.0

    def test_non_interlaced(self):
        with pytest.raises(ValueError, match="non-interlaced input"):
            from_elliptic(Ellipsoid([1, 2]), [1.5, 1.7])

    def test_round_trip_triaxial_ellipsoid(self):
        e = Ellipsoid([F(1, 5), F(1, 2), 1])
        g = np.random.default_rng(7)
        pts = g.uniform(-0.4, 0.4, size=(100, 3))
        pts = pts[np.sum(pts**2 / e.float_axes(), axis=1) < 1]
        mu = to_elliptic_many(e, pts)
        err = max(np.max(np.abs(from_elliptic(e, m) - np.abs(p))) for m, p in zip(mu, pts))
        assert err < 1e-9

    @given(st.floats(0.01, 0.99), st.floats(1.01, 1.99))
    def test_from_then_to_is_identity(self, m0, m1):
        e = Ellipsoid([1, 2])
        x = from_elliptic(e, [m0, m1])
        assert to_elliptic(e, x).mu == pytest.approx((m0, m1), abs=1e-9)
