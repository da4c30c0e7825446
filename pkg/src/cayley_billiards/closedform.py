"""Closed-form periodic caustics.

Covers the explicit families (elliptic period ``m = n``, ``n + 1`` and
``2n - 1``), the planar and spatial tables for small periods, the period-4
spatial family with one double root above the largest gap, the period-5
residual equations and the planar rotation number.

Table parameters follow the usual ``a > b (> c) > 0`` naming; an
:class:`~cayley_billiards.confocal.Ellipsoid` stores them increasing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from scipy import integrate

from .confocal import (
    CausticError,
    CausticSet,
    Ellipsoid,
    MergedSpectrum,
    SPATIAL_TYPES,
    existence_check,
    normalize_numbers,
)
from .polyform import Certificate, certificate_root_structure
from .ratpoly import Poly, is_exact_number, poly_sqrt, real_roots

__all__ = [
    "Existence",
    "IndeterminateExistence",
    "Instance",
    "NoSuchTrajectory",
    "PLANAR_TABLE",
    "PlanarResult",
    "PlanarRow",
    "PowerSums",
    "SPATIAL_TABLE",
    "SpatialResult",
    "SpatialRow",
    "c43_existence",
    "construct_m_eq_2n_minus_1",
    "construct_m_eq_n",
    "construct_m_eq_n_plus_1",
    "expected_type_m_eq_n",
    "planar_row",
    "planar_table",
    "residual_c53",
    "rotation_number",
    "solve_c43",
    "spatial_table",
    "synthesize_m_eq_2n_minus_1",
]

THRESHOLD_TOL = 1e-12


class NoSuchTrajectory(CausticError):
    """An existence inequality fails."""


class IndeterminateExistence(CausticError):
    """Float input too close to an existence threshold to decide."""


# ---------------------------------------------------------------- exact helpers
def _exact_sqrt(x):
    """Exact square root of a nonnegative Fraction, or None if irrational."""
    x = Fraction(x)
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def _is_exact(*vals) -> bool:
    return all(is_exact_number(v) for v in vals)


def _sqrt(x):
    if isinstance(x, Fraction):
        r = _exact_sqrt(x)
        return r if r is not None else math.sqrt(x)
    return math.sqrt(x)


def _sign_surd(p, q, r) -> int:
    """Exact sign of ``p + q sqrt(r)`` for rationals with ``r >= 0``."""
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sq == 0 or r == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    lhs, rhs = p * p, q * q * r
    if lhs == rhs:
        return 0
    return sp if lhs > rhs else sq


@dataclass(frozen=True)
class Existence:
    """Verdict of an existence predicate: True, False or None (indeterminate)."""

    holds: bool | None
    condition: str

    def __bool__(self):
        return bool(self.holds)

    def require(self) -> None:
        if self.holds is None:
            raise IndeterminateExistence(f"indeterminate: too close to the threshold {self.condition}")
        if not self.holds:
            raise NoSuchTrajectory(f"requires {self.condition}")


def _verdict(margins: Sequence[tuple], condition: str) -> Existence:
    """All ``p + q sqrt(r)`` must be positive; floats near zero are indeterminate."""
    indeterminate = False
    for p, q, r in margins:
        if _is_exact(p, q, r) or all(isinstance(v, (int, Fraction)) for v in (p, q, r)):
            if _sign_surd(Fraction(p), Fraction(q), Fraction(r)) <= 0:
                return Existence(False, condition)
            continue
        t = q * math.sqrt(r) if r else 0.0
        val = p + t
        scale = max(abs(p), abs(t), 1e-300)
        if abs(val) <= THRESHOLD_TOL * scale:
            indeterminate = True
        elif val < 0:
            return Existence(False, condition)
    return Existence(None if indeterminate else True, condition)


def _quadratic_roots(A, B, C) -> list:
    """Real roots of ``A t^2 + B t + C``, increasing; exact when rational."""
    disc = B * B - 4 * A * C
    if disc < 0:
        return []
    if _is_exact(A, B, C):
        s = _exact_sqrt(disc)
        if s is not None:
            return sorted([(-B - s) / (2 * A), (-B + s) / (2 * A)])
        # irrational roots: bisect the exact polynomial so every route rounds alike
        return [float(r) for r, _ in real_roots(Poly([C, B, A]))]
    s = math.sqrt(disc)
    qv = -0.5 * (B + math.copysign(s, B))
    r1 = qv / A
    r2 = C / qv if qv != 0 else -B / (2 * A)
    return sorted([r1, r2])


def _abc(a, b, c=None):
    vals = normalize_numbers([a, b] + ([] if c is None else [c]))
    if any(v <= 0 for v in vals):
        raise ValueError("parameters must be positive")
    if any(y >= x for x, y in zip(vals, vals[1:])):
        raise ValueError("parameters must satisfy a > b > c > 0" if c is not None else "parameters must satisfy a > b > 0")
    return vals


# ---------------------------------------------------------------- instances
@dataclass(frozen=True)
class Instance:
    """A billiard instance with its advertised elliptic period.

    ``R`` is ``x * prod(x - gamma_i)`` with exact rational coefficients when
    the construction data were rational, even if the individual axes or
    caustic parameters are irrational (they are then stored as floats).
    """

    ellipsoid: Ellipsoid
    caustics: CausticSet
    m: int
    tau: tuple
    certificate: Certificate | None
    R: Poly | None

    @property
    def spectrum(self) -> MergedSpectrum:
        return MergedSpectrum.from_caustics(self.ellipsoid, self.caustics)

    @property
    def n(self) -> int:
        return self.ellipsoid.n


def _monic_from_roots_reciprocal(poly_t: Poly) -> Poly:
    """Monic polynomial whose roots are the reciprocals of the roots of ``poly_t``."""
    return poly_t.reversed(poly_t.degree).monic()


def _roots_checked(p: Poly, what: str) -> list:
    """Real simple roots of ``p``; rejects multiple and non-real roots."""
    roots = real_roots(p)
    if any(k > 1 for _, k in roots):
        raise CausticError(f"singular trajectory (ruled-quadric): double root in {what}")
    if len(roots) < p.degree:
        raise CausticError(f"no trajectory of this family: non-real roots in {what}")
    out = []
    for r, _ in roots:
        if isinstance(r, Fraction) and p(r) != 0:
            out.append(float(r))  # irrational root reported as a float
        else:
            out.append(r)
    return out


def _as_mode(values: list):
    """All Fractions if every value is exact, otherwise all floats."""
    if all(isinstance(v, Fraction) for v in values):
        return values
    return [float(v) for v in values]


def expected_type_m_eq_n(n: int) -> tuple:
    """Caustic type forced by minimal period: ``(1,1,3,3,..)`` or ``(0,2,2,4,4,..)``."""
    if n % 2:
        return tuple(2 * ((k + 1) // 2) - 1 for k in range(1, n))
    return tuple(2 * (k // 2) for k in range(1, n))


def construct_m_eq_n(e: Ellipsoid) -> Instance:
    """Caustics closing with elliptic period ``n``: roots of ``t^n - prod(t - a_j)``."""
    a = list(e.axes)
    n = e.n
    C = Poly.monomial(n) - Poly.from_roots(a)
    if C.degree != n - 1:
        raise CausticError("degenerate defining polynomial")
    lams = _roots_checked(C, "t^n - prod(t - a_j)")
    exact_l = all(isinstance(v, Fraction) for v in lams)
    ef = e if exact_l else Ellipsoid([float(v) for v in a])
    cs = existence_check(ef, _as_mode(lams))
    want = expected_type_m_eq_n(n)
    if cs.type_vector != want:
        raise AssertionError(f"period-n caustic type {cs.type_vector} differs from {want}")
    # R(x) = x prod(x - 1/a_j) prod(x - 1/lambda_k) with rational coefficients
    Pa = Poly.from_roots([1 / Fraction(v) for v in a]) if e.exact else Poly.from_roots([1.0 / v for v in a])
    R = Poly.monomial(1) * Pa * _monic_from_roots_reciprocal(C)
    cert = Certificate(n, n, Poly([1]), Pa)
    return Instance(ef, cs, n, (0,) * n, cert, R)


def construct_m_eq_n_plus_1(lambdas: Sequence, d) -> Instance:
    """Axes from caustics and one extra value ``d``.

    The axes are the roots of ``t^(n+1) - (t - d)^2 prod(t - lambda_k)``;
    the certificate is ``S = x - 1/d``, ``P = (x - 1/d)^2 prod(x - 1/lambda_k)``.
    """
    vals = normalize_numbers(list(lambdas) + [d])
    lams, d = sorted(vals[:-1]), vals[-1]
    if any(v <= 0 for v in vals):
        raise ValueError("caustic parameters and d must be positive")
    n = len(lams) + 1
    T = Poly.monomial(n + 1) - Poly.from_roots([d, d] + lams)
    if T.degree != n:
        raise CausticError("degenerate defining polynomial")
    axes = _roots_checked(T, "t^(n+1) - (t-d)^2 prod(t - lambda)")
    if any(v <= 0 for v in axes):
        raise CausticError("no trajectory of this family: nonpositive axis")
    exact_axes = all(isinstance(v, Fraction) for v in axes)
    if exact_axes and _is_exact(*lams):
        e, cl = Ellipsoid(axes), lams
    else:
        e, cl = Ellipsoid([float(v) for v in axes]), [float(v) for v in lams]
    cs = existence_check(e, cl)
    one = Fraction(1) if _is_exact(d) else 1.0
    inv_d = one / d
    Pl = Poly.from_roots([one / v for v in lams])
    S = Poly([-inv_d, 1])
    P = S * S * Pl
    R = (P - P[0]) * Pl
    cert = Certificate(n + 1, n, S, P)
    spec_for_tau = R
    tau = certificate_root_structure(cert, spec_for_tau).tau
    return Instance(e, cs, n + 1, tau, cert, R)


def _assign_by_type(cvals: list, type_vector: Sequence[int]):
    """Split increasing merged values into axes and caustics for a type vector."""
    n = (len(cvals) + 1) // 2
    keys = [((j, 0, 0), ("axis", j)) for j in range(1, n + 1)]
    keys += [((s, 1, k), ("caustic", k)) for k, s in enumerate(type_vector, start=1)]
    keys.sort()
    axes, caus = [], []
    for (_, slot), v in zip(keys, cvals):
        (axes if slot[0] == "axis" else caus).append(v)
    return axes, caus


def construct_m_eq_2n_minus_1(c_values: Sequence, type_vector: Sequence[int] | None = None,
                              tol: float = 1e-9) -> Instance:
    """Accept ``2n-1`` merged values iff ``t^(2n-1) - prod(t - c_i)`` is ``kappa`` times a square.

    The square root's roots ``d_l`` give ``S = prod(x - 1/d_l)`` and
    ``P = prod(x - 1/c_i) = P(0) + x S^2``.  ``type_vector`` says which values
    are caustics; by default the first admissible assignment is used.
    """
    cv = sorted(normalize_numbers(c_values))
    k = len(cv)
    if k % 2 == 0 or k < 3:
        raise ValueError("need 2n-1 values with n >= 2")
    n = (k + 1) // 2
    D = Poly.monomial(k) - Poly.from_roots(cv)
    if D.degree != k - 1:
        raise CausticError("degenerate difference polynomial")
    kappa = D.lead
    root, rem = poly_sqrt(D)
    exact = D.is_exact
    if (exact and not rem.is_zero()) or (not exact and rem.max_abs_coeff() > tol * max(1.0, D.max_abs_coeff())):
        raise CausticError("t^(2n-1) - prod(t - c_i) is not a constant times a square")
    if kappa <= 0:
        raise CausticError("difference polynomial has negative leading coefficient")
    ds = _roots_checked(root, "the square root polynomial")
    if any(v <= 0 for v in ds):
        raise CausticError("nonpositive double root")
    return _instance_from_merged(cv, root, n, type_vector)


def _instance_from_merged(cv, root_t: Poly, n: int, type_vector) -> Instance:
    k = 2 * n - 1
    exact = all(isinstance(v, Fraction) for v in cv) and root_t.is_exact
    one = Fraction(1) if exact else 1.0
    candidates = [tuple(type_vector)] if type_vector is not None else _all_types(n)
    last_err = None
    for tv in candidates:
        axes, caus = _assign_by_type(list(cv), tv)
        try:
            e = Ellipsoid(axes)
            cs = existence_check(e, caus)
        except (ValueError, CausticError) as exc:
            last_err = exc
            continue
        if cs.type_vector != tuple(tv):
            continue
        S = _monic_from_roots_reciprocal(root_t)
        P = Poly.from_roots([one / v for v in cv]) if exact else Poly.from_roots([1.0 / float(v) for v in cv])
        R = Poly.monomial(1) * P
        cert = Certificate(k, n, S, P)
        tau = certificate_root_structure(cert, R).tau
        return Instance(e, cs, k, tau, cert, R)
    raise CausticError(f"no admissible caustic assignment: {last_err}")


def _all_types(n: int) -> list[tuple]:
    import itertools

    return [tuple(k + b for k, b in enumerate(bits)) for bits in itertools.product((0, 1), repeat=n - 1)]


def synthesize_m_eq_2n_minus_1(deltas: Sequence, K, type_vector: Sequence[int]) -> Instance:
    """Instance with ``P(x) = x prod(x - delta_l)^2 - K``, exact at polynomial level.

    The merged gammas are the roots of ``P``; they are real and positive when
    ``0 < K`` is below every local maximum of ``x prod(x - delta_l)^2`` between
    the origin and the largest delta.  Axes and caustics (floats unless
    rational) are split according to ``type_vector``.
    """
    vals = normalize_numbers(list(deltas) + [K])
    ds, K = sorted(vals[:-1], reverse=True), vals[-1]
    n = len(ds) + 1
    S = Poly.from_roots(ds)
    P = Poly.monomial(1) * S * S - K
    gam = _roots_checked(P, "x S(x)^2 - K")
    if any(g <= 0 for g in gam) or len(gam) != 2 * n - 1:
        raise CausticError("merged values not all positive")
    exact_g = all(isinstance(g, Fraction) for g in gam)
    cv = sorted((1 / g) if exact_g else 1.0 / float(g) for g in gam)
    axes, caus = _assign_by_type(cv, type_vector)
    e = Ellipsoid(axes)
    cs = existence_check(e, caus)
    if cs.type_vector != tuple(type_vector):
        raise CausticError("assignment does not realize the requested type")
    cert = Certificate(2 * n - 1, n, S, P)
    R = Poly.monomial(1) * P
    tau = certificate_root_structure(cert, R).tau
    return Instance(e, cs, 2 * n - 1, tau, cert, R)


# ---------------------------------------------------------------- planar table
@dataclass(frozen=True)
class PlanarRow:
    key: str
    caustic_type: str
    m: int
    tau: tuple
    m0: int
    m1: int
    formula: Callable
    margins: Callable
    condition: str

    @property
    def rho(self) -> Fraction:
        return Fraction(self.m1, 2 * self.m0)


@dataclass(frozen=True)
class PlanarResult:
    m: int
    m0: int
    m1: int
    rho: Fraction
    tau: tuple
    caustic_type: str
    lam: object
    existence: Existence


def _e2(a, b):
    return a * b / (a + b)


def _h2(a, b):
    return a * b / (a - b)


def _e3_10(a, b):
    s = _sqrt(a * b)
    return a * b / (a + b + 2 * s)


def _h3_10(a, b):
    s = _sqrt(a * b)
    return a * b / (a + b - 2 * s)


def _e3_01(a, b):
    s = _sqrt(a * a - a * b + b * b)
    return 3 * a * b / (a + b + 2 * s)


def _h3_01(a, b):
    s = _sqrt(a * a - a * b)
    return a * b / (2 * s + b - a)


PLANAR_TABLE: tuple[PlanarRow, ...] = (
    PlanarRow("E2", "E", 2, (0, 0), 4, 2, _e2, lambda a, b: [], "always"),
    PlanarRow("H2", "H", 2, (0, 0), 4, 2, _h2, lambda a, b: [(a - 2 * b, 0, 0)], "2b<a"),
    PlanarRow("E3-10", "E", 3, (1, 0), 6, 2, _e3_10, lambda a, b: [], "always"),
    PlanarRow("H3-10", "H", 3, (1, 0), 6, 2, _h3_10, lambda a, b: [(a - 4 * b, 0, 0)], "4b<a"),
    PlanarRow("E3-01", "E", 3, (0, 1), 3, 2, _e3_01, lambda a, b: [], "always"),
    PlanarRow("H3-01", "H", 3, (0, 1), 6, 4, _h3_01, lambda a, b: [(3 * a - 4 * b, 0, 0)], "4b<3a"),
)


def planar_row(m: int, caustic_type: str, tau: Sequence[int] | None = None) -> PlanarRow:
    ct = caustic_type.strip().upper()
    rows = [r for r in PLANAR_TABLE if r.m == m and r.caustic_type == ct]
    if tau is not None:
        rows = [r for r in rows if r.tau == tuple(tau)]
    if not rows:
        raise ValueError(f"no planar table row for m={m}, type={caustic_type}, tau={tau}")
    if len(rows) > 1:
        raise ValueError(f"m={m}, type={caustic_type} needs a signature: (1,0) or (0,1)")
    return rows[0]


def planar_table(a, b, m: int, caustic_type: str, tau: Sequence[int] | None = None) -> PlanarResult:
    """Caustic parameter of the planar table row selected by ``m``, type and ``tau``.

    Raises :class:`NoSuchTrajectory` when the row's existence inequality fails.
    """
    a, b = _abc(a, b)
    row = planar_row(m, caustic_type, tau)
    ex = _verdict(row.margins(a, b), row.condition)
    ex.require()
    lam = row.formula(a, b)
    return PlanarResult(row.m, row.m0, row.m1, row.rho, row.tau, row.caustic_type, lam, ex)


# ---------------------------------------------------------------- spatial table
@dataclass(frozen=True)
class SpatialRow:
    caustic_type: str
    solve: Callable
    margins: Callable
    condition: str
    m: int = 3
    m0: int = 6
    winding: tuple = (6, 4, 2)

    @property
    def type_vector(self) -> tuple:
        return SPATIAL_TYPES[self.caustic_type]


@dataclass(frozen=True)
class SpatialResult:
    caustics: CausticSet
    ellipsoid: Ellipsoid
    existence: Existence
    caustic_poly: Poly | None


def _eh1(a, b, c):
    l1 = c - c**3 / ((b - c) * (a - c))
    l2 = 1 / (1 / a + 1 / b + 1 / l1 - 1 / c)
    return [l1, l2], None


def _h1h1(a, b, c):
    A, B, C = a + b + c, -(a * b + a * c + b * c), a * b * c
    return _quadratic_roots(A, B, C), Poly([C, B, A])


def _eh2(a, b, c):
    A = (a - b) * (a - c)
    B = (b * c - a * (b + c)) * a
    C = a * a * b * c
    return _quadratic_roots(A, B, C), Poly([C, B, A])


def _h1h2(a, b, c):
    l2 = b + b**3 / ((b - c) * (a - b))
    l1 = 1 / (1 / a + 1 / c + 1 / l2 - 1 / b)
    return [l1, l2], None


SPATIAL_TABLE: tuple[SpatialRow, ...] = (
    SpatialRow("EH1", _eh1,
               lambda a, b, c: [(a * b - c * (a + b), -c, a * b)],
               "c < ab/(a+b+√(ab))"),
    SpatialRow("H1H1", _h1h1,
               lambda a, b, c: [(a * b - c * (a + b), -2 * c, a * b)],
               "c < ab/(a+b+2√(ab))"),
    SpatialRow("EH2", _eh2,
               lambda a, b, c: [(a - 2 * b, 0, 0), ((a - 2 * b) * a - c * (2 * a - 3 * b), 0, 0)],
               "2b < a and c < (a-2b)a/(2a-3b)"),
    SpatialRow("H1H2", _h1h2,
               lambda a, b, c: [((a - 2 * b) * a * b - c * (a - b) ** 2, 0, 0),
                                (b * (a + c) - a * c, -b, a * c)],
               "c < (a-2b)ab/(a-b)^2 and b > ac/(a+c-√(ac))"),
)


def spatial_row(caustic_type: str) -> SpatialRow:
    key = caustic_type.strip().upper()
    for row in SPATIAL_TABLE:
        if row.caustic_type == key:
            return row
    raise ValueError(f"unknown spatial caustic type {caustic_type!r}")


def spatial_existence(a, b, c, caustic_type: str) -> Existence:
    a, b, c = _abc(a, b, c)
    row = spatial_row(caustic_type)
    return _verdict(row.margins(a, b, c), row.condition)


def spatial_table(a, b, c, caustic_type: str) -> SpatialResult:
    """Caustics with elliptic period 3 inside ``x^2/a + y^2/b + z^2/c = 1``.

    Raises :class:`NoSuchTrajectory` naming the violated inequality.
    """
    a, b, c = _abc(a, b, c)
    row = spatial_row(caustic_type)
    ex = _verdict(row.margins(a, b, c), row.condition)
    ex.require()
    lams, poly = row.solve(a, b, c)
    if len(lams) != 2:
        raise AssertionError("existence holds but the defining quadratic has no real roots")
    lams = sorted(lams)
    exact = _is_exact(a, b, c) and _is_exact(*lams)
    e = Ellipsoid([c, b, a]) if exact else Ellipsoid([float(c), float(b), float(a)])
    cs = existence_check(e, lams if exact else [float(v) for v in lams])
    if cs.type_vector != row.type_vector:
        raise AssertionError(f"{row.caustic_type} formula produced type {cs.label}")
    if poly is None and exact:
        poly = Poly.from_roots(lams)
    return SpatialResult(cs, e, ex, poly)


# ---------------------------------------------------------------- period four
@dataclass(frozen=True)
class PowerSums:
    """``s_l = sum(weight / value**l)`` over a recorded recipe."""

    recipe: tuple  # ((value, weight), ...)

    def s(self, l: int):
        return sum(w / v**l for v, w in self.recipe)

    def __getitem__(self, l: int):
        return self.s(l)


def c43_existence(a, b, c) -> Existence:
    a, b, c = _abc(a, b, c)
    return _verdict([(a * b - c * (a + b), 0, 0)], "c < ab/(a+b)")


@dataclass(frozen=True)
class C43Result:
    d: object
    lambdas: tuple
    ellipsoid: Ellipsoid
    caustics: CausticSet
    existence: Existence
    power_sums: PowerSums


def solve_c43(a, b, c) -> C43Result:
    """Caustics of type H1H1 closing with elliptic period 4 and signature ``(0,0,1)``.

    ``d`` is the root in ``(a, inf)`` of ``t^3 - 2(a+b+c)t^2 + 3(ab+ac+bc)t - 4abc``
    and the caustic parameters are the roots of ``(s1^2 - s2) t^2 / 2 - s1 t + 1``
    with ``s_l = a^-l + b^-l + c^-l - 2 d^-l``.
    """
    a, b, c = _abc(a, b, c)
    ex = c43_existence(a, b, c)
    ex.require()
    cubic = Poly([-4 * a * b * c, 3 * (a * b + a * c + b * c), -2 * (a + b + c), 1])
    roots = [r for r, _ in real_roots(cubic, (a, None))]
    if len(roots) != 1:
        raise AssertionError(f"expected one cubic root above a, found {len(roots)}")
    d = roots[0]
    if isinstance(d, Fraction) and cubic(d) != 0:
        d = float(d)
    if not _is_exact(d):
        a_, b_, c_ = float(a), float(b), float(c)
    else:
        a_, b_, c_ = a, b, c
    ps = PowerSums(((a_, 1), (b_, 1), (c_, 1), (d, -2)))
    s1, s2 = ps[1], ps[2]
    lams = _quadratic_roots((s1 * s1 - s2) / 2, -s1, 1)
    if len(lams) != 2 or not all(c_ < v < b_ for v in lams):
        raise AssertionError("period-4 caustics left the interval (c, b)")
    exact = _is_exact(a_, b_, c_, *lams)
    e = Ellipsoid([c_, b_, a_]) if exact else Ellipsoid([float(c_), float(b_), float(a_)])
    cs = existence_check(e, lams if exact else [float(v) for v in lams])
    if cs.label != "H1H1":
        raise AssertionError(f"period-4 caustics have type {cs.label}")
    return C43Result(d, tuple(lams), e, cs, ex, ps)


def residual_c53(a, b, c, lam1, lam2) -> tuple:
    """Period-5 residuals ``(8 s3 + s1^3 - 6 s1 s2, 16 s4 + s1^4 - 4 s1^2 s2 - 4 s2^2)``.

    Here ``s_l`` is the sum of ``1/x**l`` over the five parameters.
    """
    vals = normalize_numbers([a, b, c, lam1, lam2])
    ps = PowerSums(tuple((v, 1) for v in vals))
    s1, s2, s3, s4 = ps[1], ps[2], ps[3], ps[4]
    return (8 * s3 + s1**3 - 6 * s1 * s2, 16 * s4 + s1**4 - 4 * s1 * s1 * s2 - 4 * s2 * s2)


# ---------------------------------------------------------------- rotation number
def _quad(f, lo, hi):
    val, _ = integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def _integral_one_end(w, z, u):
    """``int_0^u dt / sqrt((u - t)(u + w - t)(z - t))`` via ``t = u - s^2``."""
    return _quad(lambda s: 2.0 / math.sqrt((w + s * s) * (z - u + s * s)), 0.0, math.sqrt(u))


def _integral_two_ends(x, y, z):
    """``int_y^z dt / sqrt((t - x)(t - y)(z - t))``, both ends substituted."""
    mid = 0.5 * (y + z)
    left = _quad(lambda s: 2.0 / math.sqrt((y - x + s * s) * (z - y - s * s)), 0.0, math.sqrt(mid - y))
    right = _quad(lambda s: 2.0 / math.sqrt((z - x - s * s) * (z - y - s * s)), 0.0, math.sqrt(z - mid))
    return left + right


def rotation_number(a, b, lam, tol: float = 1e-12) -> float:
    """Planar rotation number of the caustic ``lam`` inside ``x^2/a + y^2/b = 1``.

    The value depends only on the sorted triple ``x < y < z`` of
    ``{a, b, lam}``: ``int_0^x / (2 int_y^z)`` of
    ``dt / sqrt(|(x - t)(y - t)(z - t)|)``.  Endpoint singularities are removed
    by ``t = endpoint -+ s^2`` before adaptive Gauss-Kronrod quadrature.
    """
    a, b, lam = float(a), float(b), float(lam)
    hi_ax, lo_ax = max(a, b), min(a, b)
    if not (a > 0 and b > 0 and a != b):
        raise ValueError("need distinct positive a, b")
    if not 0 < lam < hi_ax:
        raise CausticError("no tangent trajectories exist")
    if abs(lam - lo_ax) <= tol * hi_ax or abs(lam - hi_ax) <= tol * hi_ax:
        raise CausticError("singular caustic")
    x, y, z = sorted((a, b, lam))
    num = _integral_one_end(y - x, z, x)
    den = _integral_two_ends(x, y, z)
    return num / (2.0 * den)
