"""Rank test for periodicity built from the Taylor series of a square root.

For a merged spectrum ``gamma_1 > ... > gamma_{2n-1}`` let
``f(t) = sqrt(prod(1 - gamma_i t)) = sum f_l t^l``.  Billiard trajectories
with these caustics close with elliptic period ``m`` exactly when the
``(m-1) x (m-n+1)`` matrix with entries ``f_{m+1+i-j}`` has rank below
``m-n+1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .confocal import MergedSpectrum, normalize_numbers
from .ratpoly import Poly, elementary_symmetric, is_exact_number, rank_exact

__all__ = [
    "CayleyMatrix",
    "CayleyVerdict",
    "TaylorSeries",
    "cayley_condition",
    "cayley_matrix",
    "det_exact",
    "minor_degree",
    "minor_system",
    "taylor_coeffs",
    "taylor_coeffs_from_r",
]

FLOAT_RANK_TOL = 1e-9


@dataclass(frozen=True)
class TaylorSeries:
    """Coefficients ``f_0..f_L`` of ``sqrt(r(t))`` with ``r(0) = 1``.

    ``gammas`` is empty when the series was built from ``r`` directly.
    """

    gammas: tuple
    coeffs: tuple
    order: int

    def __getitem__(self, l: int):
        return self.coeffs[l]

    @property
    def exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)


def _series_from_rcoeffs(rc: Sequence, L: int) -> list:
    """``2 f_l = r_l - sum_{k=1}^{l-1} f_k f_{l-k}`` with ``f_0 = 1``."""
    exact = all(is_exact_number(c) for c in rc)
    one = Fraction(1) if exact else 1.0
    rc = [Fraction(c) if exact else float(c) for c in rc]
    f = [one]
    for l in range(1, L + 1):
        rl = rc[l] if l < len(rc) else 0 * one
        acc = rl - sum(f[k] * f[l - k] for k in range(1, l))
        f.append(acc / 2)
    return f


def _check_square(f: list, rc: Sequence, L: int) -> None:
    exact = all(isinstance(c, Fraction) for c in f)
    for l in range(L + 1):
        sq = sum(f[k] * f[l - k] for k in range(l + 1))
        rl = rc[l] if l < len(rc) else 0
        if exact:
            if sq != rl:
                raise ArithmeticError("truncated series does not square to r(t)")
        else:
            scale = max(1.0, *(abs(float(c)) for c in f[: l + 1]))
            if abs(sq - rl) > 1e-9 * scale * scale:
                raise ArithmeticError("truncated series does not square to r(t)")


def taylor_coeffs(gammas, L: int) -> TaylorSeries:
    """Taylor coefficients of ``sqrt(prod(1 - gamma_i t))`` through order ``L``.

    Parameters
    ----------
    gammas : sequence or MergedSpectrum
        The values ``gamma_i``; exact rationals give exact coefficients.
    L : int
        Highest order computed.

    Examples
    --------
    >>> [int(c) for c in taylor_coeffs([3, 2, 1], 3).coeffs]
    [1, -3, 1, 0]
    """
    if L < 0:
        raise ValueError("order must be nonnegative")
    g = list(gammas.gamma) if isinstance(gammas, MergedSpectrum) else normalize_numbers(gammas)
    rc = [(-1) ** l * elementary_symmetric(g, l) for l in range(len(g) + 1)]
    f = _series_from_rcoeffs(rc, L)
    _check_square(f, rc, L)
    return TaylorSeries(tuple(g), tuple(f), L)


def taylor_coeffs_from_r(r: Poly, L: int) -> TaylorSeries:
    """Same as :func:`taylor_coeffs` for an explicit ``r(t)`` with ``r(0) = 1``.

    Useful when the roots of ``r`` are irrational but its coefficients are not.
    """
    if r[0] != 1:
        raise ValueError("r(0) must equal 1")
    exact = r.is_exact
    rc = [Fraction(c) if exact else float(c) for c in r.coeffs]
    f = _series_from_rcoeffs(rc, L)
    _check_square(f, rc, L)
    return TaylorSeries((), tuple(f), L)


@dataclass(frozen=True)
class CayleyMatrix:
    """The ``(m-1) x (m-n+1)`` matrix with ``entry(i, j) = f_{m+1+i-j}`` (0-based).

    Its corners are ``f_{m+1}`` (top left), ``f_{n+1}`` (top right),
    ``f_{2m-1}`` (bottom left) and ``f_{m+n-1}`` (bottom right).
    """

    m: int
    n: int
    entries: tuple

    @property
    def shape(self) -> tuple:
        return (self.m - 1, self.m - self.n + 1)

    def hankel(self) -> list[list]:
        """Columns reversed: a standard Hankel matrix ``f_{n+1+i+j}``."""
        return [list(reversed(row)) for row in self.entries]

    def to_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])


def cayley_matrix(series: TaylorSeries, m: int, n: int) -> CayleyMatrix:
    if m < n:
        raise ValueError("elliptic period below dimension")
    if series.order < 2 * m - 1:
        raise ValueError(f"series order {series.order} below 2m-1 = {2 * m - 1}")
    rows = tuple(
        tuple(series[m + 1 + i - j] for j in range(m - n + 1)) for i in range(m - 1)
    )
    return CayleyMatrix(m, n, rows)


@dataclass(frozen=True)
class CayleyVerdict:
    """Result of the rank test; ``exact`` is False for the float diagnostic path."""

    holds: bool
    rank: int
    full_rank: int
    exact: bool

    def __bool__(self):
        return self.holds


def _float_rank(matrix: CayleyMatrix, scale: float, tol: float) -> int:
    a = matrix.to_float()
    # f_l is homogeneous of degree l, so rescaling gamma by 1/scale divides it by scale**l
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            a[i, j] /= scale ** (matrix.m + 1 + i - j)
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol))


def cayley_condition(spec, m: int, n: int | None = None,
                     tol: float = FLOAT_RANK_TOL) -> CayleyVerdict:
    """Decide the periodicity condition with elliptic period ``m``.

    Parameters
    ----------
    spec : MergedSpectrum, TaylorSeries or Poly
        The spectrum, a precomputed series (then ``n`` is required) or the
        polynomial ``R(x) = x * prod(x - gamma_i)`` of degree ``2n``.
    m : int
        Elliptic period, at least ``n``.
    tol : float
        Singular-value threshold for float input after rescaling the largest
        gamma to 1.  Exact input never uses it.
    """
    scale = 1.0
    if isinstance(spec, MergedSpectrum):
        n = spec.n
        if m < n:
            raise ValueError("elliptic period below dimension")
        series = taylor_coeffs(spec, 2 * m - 1)
        scale = float(spec.gamma[0])
    elif isinstance(spec, Poly):
        if spec.degree % 2 or spec[0] != 0 or spec.lead != 1:
            raise ValueError("R must be monic of even degree with R(0) = 0")
        n = spec.degree // 2
        if m < n:
            raise ValueError("elliptic period below dimension")
        series = taylor_coeffs_from_r(spec.reversed(spec.degree), 2 * m - 1)
        scale = max(1.0, spec.max_abs_coeff() ** (1.0 / spec.degree))
    elif isinstance(spec, TaylorSeries):
        if n is None:
            raise ValueError("n is required with a bare Taylor series")
        series = spec
        if series.gammas:
            scale = max(float(g) for g in series.gammas)
    else:
        raise TypeError("spec must be a MergedSpectrum, TaylorSeries or Poly")
    mat = cayley_matrix(series, m, n)
    full = m - n + 1
    if series.exact:
        rank = rank_exact(mat.entries)
        return CayleyVerdict(rank < full, rank, full, True)
    rank = _float_rank(mat, scale, tol)
    return CayleyVerdict(rank < full, rank, full, False)


def det_exact(matrix: Sequence[Sequence]) -> Fraction:
    """Determinant of a square rational matrix by Gaussian elimination."""
    a = [[Fraction(v) for v in row] for row in matrix]
    k = len(a)
    if any(len(row) != k for row in a):
        raise ValueError("matrix must be square")
    det = Fraction(1)
    for col in range(k):
        piv = next((r for r in range(col, k) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, k):
            f = a[r][col] / p
            if f:
                for c in range(col, k):
                    a[r][c] -= f * a[col][c]
    return det


def minor_degree(m: int, n: int, l: int) -> int:
    """Homogeneity degree of the minor ``M_{m,n,l}`` in the gammas."""
    return (m - n + 2) * m - n + l


def minor_system(spec, m: int, l: int):
    """The minor formed by the first ``m-n`` rows and row ``m-n+l`` (1-based).

    For ``n = 2`` and ``l = 1`` this is the full square determinant.
    Exact for rational spectra.
    """
    if isinstance(spec, MergedSpectrum):
        n = spec.n
        gam = spec.gamma
    else:
        gam = normalize_numbers(spec)
        n = (len(gam) + 1) // 2
    if m < n:
        raise ValueError("elliptic period below dimension")
    if not 1 <= l <= n - 1:
        raise ValueError(f"minor index l={l} outside 1..{n - 1}")
    mat = cayley_matrix(taylor_coeffs(gam, 2 * m - 1), m, n)
    rows = list(mat.entries[: m - n]) + [mat.entries[m - n + l - 1]]
    if all(isinstance(v, Fraction) for row in rows for v in row):
        return det_exact(rows)
    return float(np.linalg.det(np.array(rows, dtype=float)))
