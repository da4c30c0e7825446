"""Ellipsoids, confocal families, caustic sets and Jacobi elliptic coordinates.

An ellipsoid ``sum(x_j**2 / a_j) = 1`` is stored by its parameters
``a_1 < ... < a_n``.  Values are either all exact (``int``/``Fraction``) or
all binary64 floats; ``int`` is neutral and mixing ``Fraction`` with
``float`` raises ``ValueError``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .ratpoly import is_exact_number

__all__ = [
    "CausticError",
    "CausticSet",
    "Ellipsoid",
    "EllipticCoords",
    "MergedSpectrum",
    "SPATIAL_TYPES",
    "caustic_type_label",
    "existence_check",
    "format_number",
    "from_elliptic",
    "normalize_numbers",
    "parse_number",
    "parse_numbers",
    "to_elliptic",
    "to_elliptic_many",
    "type_from_label",
]

FLOAT_TOL = 1e-12

# caustic type vectors for the spatial case, keyed by their usual names
SPATIAL_TYPES = {"EH1": (0, 1), "H1H1": (1, 1), "EH2": (0, 2), "H1H2": (1, 2)}
PLANAR_TYPES = {"E": (0,), "H": (1,)}


class CausticError(ValueError):
    """Rejected caustic parameters (singular or nonexistent trajectories)."""


def parse_number(text: str):
    """Parse ``"p/q"`` to Fraction, integer literals to int, decimals to float."""
    s = text.strip()
    if not s:
        raise ValueError("empty number")
    if "/" in s:
        return Fraction(s)
    try:
        return int(s)
    except ValueError:
        return float(s)


def parse_numbers(text: str) -> list:
    return normalize_numbers([parse_number(t) for t in text.split(",") if t.strip()])


def normalize_numbers(values: Sequence) -> list:
    """Bring values to one arithmetic mode.

    Returns Fractions when no float is present, floats when no Fraction is
    present (ints are neutral), and raises ``ValueError`` on a mixture.
    """
    vals = list(values)
    has_float = any(isinstance(v, (float, np.floating)) for v in vals)
    has_frac = any(isinstance(v, Fraction) for v in vals)
    if has_float and has_frac:
        raise ValueError("mixed exact and float inputs")
    for v in vals:
        if not (is_exact_number(v) or isinstance(v, (float, np.floating))):
            raise TypeError(f"unsupported number type: {v!r}")
    if has_float:
        return [float(v) for v in vals]
    return [Fraction(v) for v in vals]


def format_number(x) -> str:
    """Exact rationals as ``p/q`` (or ``p``), floats with 17 significant digits."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if is_exact_number(x):
        return str(int(x))
    return f"{float(x):.17g}"


def _is_exact_seq(values) -> bool:
    return all(isinstance(v, Fraction) for v in values)


@dataclass(frozen=True)
class Ellipsoid:
    """Ellipsoid ``sum x_j^2 / a_j = 1`` with ``0 < a_1 < ... < a_n``."""

    axes: tuple

    def __init__(self, axes: Sequence):
        vals = tuple(normalize_numbers(axes))
        if len(vals) < 2:
            raise ValueError("dimension must be at least 2")
        if vals[0] <= 0:
            raise ValueError("axis parameters must be positive")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("axis parameters must be strictly increasing")
        object.__setattr__(self, "axes", vals)

    @classmethod
    def parse(cls, text: str) -> "Ellipsoid":
        return cls(sorted(parse_numbers(text)))

    def __str__(self):
        return ",".join(format_number(a) for a in self.axes)

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def exact(self) -> bool:
        return _is_exact_seq(self.axes)

    def float_axes(self) -> np.ndarray:
        return np.array([float(a) for a in self.axes])

    def residual(self, x) -> float:
        """``sum x_j^2 / a_j - 1``."""
        x = np.asarray(x, dtype=float)
        return float(np.sum(x * x / self.float_axes()) - 1.0)


@dataclass(frozen=True)
class CausticSet:
    """Caustic parameters ``lambda_1 < ... < lambda_{n-1}`` and their type vector."""

    params: tuple
    type_vector: tuple

    @property
    def label(self) -> str:
        return caustic_type_label(self.type_vector)

    def __str__(self):
        return ",".join(format_number(v) for v in self.params)


def caustic_type_label(type_vector: Sequence[int]) -> str:
    tv = tuple(type_vector)
    for table in (PLANAR_TYPES, SPATIAL_TYPES):
        for name, vec in table.items():
            if vec == tv:
                return name
    return "(" + ",".join(str(v) for v in tv) + ")"


def type_from_label(label: str, n: int) -> tuple:
    """Type vector from ``E``/``H``, ``EH1``/``H1H1``/``EH2``/``H1H2`` or ``0,1,...``."""
    table = PLANAR_TYPES if n == 2 else SPATIAL_TYPES if n == 3 else {}
    key = label.strip().upper()
    if key in table:
        return table[key]
    try:
        tv = tuple(int(t) for t in label.strip("() ").split(","))
    except ValueError:
        raise ValueError(f"unknown caustic type {label!r} for n={n}") from None
    if len(tv) != n - 1 or any(v not in (k, k + 1) for k, v in enumerate(tv)):
        raise ValueError(f"invalid caustic type vector {tv} for n={n}")
    return tv


def existence_check(e: Ellipsoid, params: Sequence, tol: float = FLOAT_TOL) -> CausticSet:
    """Accept caustic parameters for nonsingular trajectories and classify them.

    Each ``lambda_k`` must lie in ``(a_{k-1}, a_k)`` or ``(a_k, a_{k+1})``
    with ``a_0 = 0``; the type entry is ``k-1`` or ``k`` accordingly.
    Float inputs use ``tol`` (relative) when testing equality with an axis.
    """
    lams = normalize_numbers(params)
    if len(lams) != e.n - 1:
        raise ValueError(f"expected {e.n - 1} caustic parameters, got {len(lams)}")
    if e.exact != _is_exact_seq(lams):
        raise ValueError("mixed exact and float inputs")
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("caustic parameters must be strictly increasing")
    ext = (0,) + tuple(e.axes)
    exact = e.exact
    types = []
    for k, lam in enumerate(lams, start=1):
        for a in e.axes:
            if (lam == a) if exact else abs(lam - a) <= tol * abs(a):
                raise CausticError("singular caustic")
        if ext[k - 1] < lam < ext[k]:
            types.append(k - 1)
        elif ext[k] < lam < ext[k + 1]:
            types.append(k)
        else:
            raise CausticError("no tangent trajectories exist")
    return CausticSet(tuple(lams), tuple(types))


@dataclass(frozen=True)
class MergedSpectrum:
    """Merged and sorted axes plus caustic parameters.

    ``c`` is increasing, ``gamma = 1/c`` decreasing; ``gamma_ext`` appends
    the conventional ``gamma_{2n} = 0``.  ``tags[i]`` is ``("axis", j)`` or
    ``("caustic", k)`` (1-based) or ``None`` when built from bare values.
    """

    c: tuple
    gamma: tuple
    tags: tuple

    def __init__(self, c: Sequence, tags: Sequence | None = None):
        vals = normalize_numbers(c)
        if len(vals) % 2 == 0 or len(vals) < 3:
            raise ValueError("merged spectrum needs 2n-1 values with n >= 2")
        order = sorted(range(len(vals)), key=lambda i: vals[i])
        vals = [vals[i] for i in order]
        if vals[0] <= 0:
            raise ValueError("spectrum values must be positive")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("spectrum values must be pairwise distinct")
        if tags is not None:
            tags = tuple(tuple(tags[i]) for i in order)
            kinds = [t[0] for t in tags]
            n = (len(vals) + 1) // 2
            if kinds.count("axis") != n or kinds.count("caustic") != n - 1:
                raise ValueError("spectrum tags must hold n axes and n-1 caustics")
        exact = _is_exact_seq(vals)
        gam = tuple((1 / v) if exact else 1.0 / v for v in vals)
        object.__setattr__(self, "c", tuple(vals))
        object.__setattr__(self, "gamma", gam)
        object.__setattr__(self, "tags", tags)

    @classmethod
    def from_caustics(cls, e: Ellipsoid, cs: CausticSet) -> "MergedSpectrum":
        if len(cs.params) != e.n - 1:
            raise ValueError("caustic count does not match dimension")
        c = list(e.axes) + list(cs.params)
        tags = [("axis", j + 1) for j in range(e.n)] + [
            ("caustic", k + 1) for k in range(e.n - 1)
        ]
        return cls(c, tags)

    @classmethod
    def from_gammas(cls, gammas: Sequence) -> "MergedSpectrum":
        vals = normalize_numbers(gammas)
        exact = _is_exact_seq(vals)
        return cls([(1 / g) if exact else 1.0 / g for g in vals])

    @property
    def n(self) -> int:
        return (len(self.c) + 1) // 2

    @property
    def exact(self) -> bool:
        return _is_exact_seq(self.c)

    @property
    def gamma_ext(self) -> tuple:
        return self.gamma + ((Fraction(0) if self.exact else 0.0),)

    def oscillation_intervals(self) -> list[tuple]:
        """Ranges ``[c_{2j}, c_{2j+1}]`` of the elliptic coordinates, ``c_0 = 0``."""
        ext = (0.0,) + tuple(float(v) for v in self.c)
        return [(ext[2 * j], ext[2 * j + 1]) for j in range(self.n)]

    def axis_positions(self) -> list[int]:
        """1-based positions in ``gamma`` that carry axis values."""
        if self.tags is None:
            raise ValueError("spectrum has no origin tags")
        return [i + 1 for i, t in enumerate(self.tags) if t[0] == "axis"]


@dataclass(frozen=True)
class EllipticCoords:
    """Jacobi elliptic coordinates ``mu_0 <= a_1 <= mu_1 <= ... <= a_n``."""

    mu: tuple


def _bisect_roots(axes: np.ndarray, X: np.ndarray, iters: int = 200) -> np.ndarray:
    """Vectorized bisection for the roots of ``sum x^2/(a-mu) - 1``, one per slot."""
    N, n = X.shape
    X2 = X * X
    lo = np.empty((N, n))
    hi = np.empty((N, n))
    lo[:, 0] = axes[0] - X2.sum(axis=1) - 1.0
    hi[:, 0] = axes[0]
    lo[:, 1:] = axes[:-1]
    hi[:, 1:] = axes[1:]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        # g(mu) increases on every slot; terms with x_j = 0 vanish identically
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = X2[:, None, :] / (axes[None, None, :] - mid[:, :, None])
        terms = np.where(X2[:, None, :] == 0.0, 0.0, terms)
        g = terms.sum(axis=2) - 1.0
        neg = g < 0
        new_lo = np.where(neg, mid, lo)
        new_hi = np.where(neg, hi, mid)
        if np.array_equal(new_lo, lo) and np.array_equal(new_hi, hi):
            break
        lo, hi = new_lo, new_hi
    return 0.5 * (lo + hi)


def to_elliptic(e: Ellipsoid, x) -> EllipticCoords:
    """Elliptic coordinates of a point.

    Solves ``sum x_j^2/(a_j - mu) = 1`` by bisection in each slot.  When
    ``x_j = 0`` the root colliding with ``a_j`` goes to the lower slot
    (``mu_{j-1} = a_j``) unless interlacing forces the upper one.
    """
    mu = to_elliptic_many(e, np.asarray(x, dtype=float)[None, :])[0]
    return EllipticCoords(tuple(float(v) for v in mu))


def to_elliptic_many(e: Ellipsoid, X) -> np.ndarray:
    """Row-wise :func:`to_elliptic` for an ``(N, n)`` array of points."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != e.n:
        raise ValueError("point dimension does not match ellipsoid")
    return _bisect_roots(e.float_axes(), X)


def from_elliptic(e: Ellipsoid, mu, tol: float = 1e-9) -> np.ndarray:
    """Cartesian point with nonnegative coordinates from elliptic coordinates."""
    m = [float(v) for v in (mu.mu if isinstance(mu, EllipticCoords) else mu)]
    a = e.float_axes()
    if len(m) != e.n:
        raise ValueError("need n elliptic coordinates")
    x = np.empty(e.n)
    scale = max(1.0, float(a[-1]))
    for j in range(e.n):
        num = np.prod([a[j] - mi for mi in m])
        den = np.prod([a[j] - a[i] for i in range(e.n) if i != j])
        r = num / den
        if r < -tol * scale:
            raise ValueError("non-interlaced input")
        x[j] = np.sqrt(max(r, 0.0))
    return x
