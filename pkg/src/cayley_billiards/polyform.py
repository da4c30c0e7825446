"""Polynomial certificates for periodicity and the signature solver.

A certificate for elliptic period ``m`` is a pair of monic polynomials
``S`` (degree ``m-n``) and ``P`` (degree ``m``) with ``P(0) != 0`` and

    S(x)**2 * R(x) = P(x) * (P(x) - P(0)),   R(x) = x * prod(x - gamma_i).

The double roots ``delta`` of the right-hand side come from ``S``; how they
spread over the gaps ``(gamma_{2r}, gamma_{2r-1})`` (with ``gamma_{2n} = 0``)
is the signature ``tau``.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .cayley import cayley_matrix, taylor_coeffs, taylor_coeffs_from_r
from .confocal import (
    CausticSet,
    Ellipsoid,
    MergedSpectrum,
    caustic_type_label,
    existence_check,
    normalize_numbers,
)
from .ratpoly import Poly, is_exact_number, poly_gcd, real_roots

__all__ = [
    "Certificate",
    "CertificateCheck",
    "Decomposition",
    "NoConvergence",
    "RootReport",
    "SignatureSolution",
    "SpuriousRoot",
    "certificate_from_deltas",
    "certificate_from_matrix",
    "certificate_root_structure",
    "decomposition_from_signature",
    "ordering_partition",
    "power_sum_residual",
    "r_poly",
    "R_poly",
    "signatures",
    "solve_signature",
    "solve_signature_all",
    "verify_certificate",
]

log = logging.getLogger(__name__)


class NoConvergence(RuntimeError):
    """Newton multistart did not reach the residual target."""

    def __init__(self, msg: str, trace: list | None = None):
        super().__init__(msg)
        self.trace = trace or []


class SpuriousRoot(ValueError):
    """A converged point violates the gap or ordering constraints."""


# ---------------------------------------------------------------- polynomials
def _gammas_of(spec) -> list:
    if isinstance(spec, MergedSpectrum):
        return list(spec.gamma)
    return normalize_numbers(spec)


def R_poly(spec) -> Poly:
    """``R(x) = x * prod(x - gamma_i)``; a Poly argument is returned as is."""
    if isinstance(spec, Poly):
        return spec
    return Poly.from_roots([0] + _gammas_of(spec))


def r_poly(spec) -> Poly:
    """``r(t) = prod(1 - gamma_i t)``; a Poly argument is taken as ``R(x)``."""
    if isinstance(spec, Poly):
        return spec.reversed(spec.degree)
    p = Poly([1])
    for g in _gammas_of(spec):
        p = p * Poly([1, -g])
    return p


@dataclass(frozen=True)
class Certificate:
    """Monic ``S`` of degree ``m-n`` and monic ``P`` of degree ``m``; ``alpha = P(0)``."""

    m: int
    n: int
    S: Poly
    P: Poly

    def __post_init__(self):
        if self.S.degree != self.m - self.n or self.S.lead != 1:
            raise ValueError("S must be monic of degree m-n")
        if self.P.degree != self.m or self.P.lead != 1:
            raise ValueError("P must be monic of degree m")

    @property
    def alpha(self):
        return self.P[0]

    @property
    def exact(self) -> bool:
        return self.S.is_exact and self.P.is_exact

    def t_form(self) -> tuple[Poly, Poly, object]:
        """``(s, q, alpha)`` with ``s(t) = t^(m-n) S(1/t)`` and ``q(t) = t^m (P(1/t) - alpha)``."""
        s = self.S.reversed(self.m - self.n)
        q = (self.P - self.alpha).reversed(self.m)
        return s, q, self.alpha

    @classmethod
    def from_t_form(cls, s: Poly, q: Poly, alpha, m: int, n: int) -> "Certificate":
        S = s.reversed(m - n)
        P = q.reversed(m) + alpha
        return cls(m, n, S, P)


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    residual: float
    relative: float
    exact: bool

    def __bool__(self):
        return self.ok


def verify_certificate(spec, cert: Certificate, tol: float = 1e-9) -> CertificateCheck:
    """Check ``S^2 R = P (P - P(0))``.

    Exact polynomials are compared coefficient by coefficient; otherwise the
    largest coefficient residual is reported and compared, relative to the
    largest coefficient of ``P^2``, against ``tol``.
    """
    if cert.alpha == 0:
        raise ValueError("degenerate certificate")
    R = R_poly(spec)
    if R.degree != 2 * cert.n:
        raise ValueError("spectrum dimension does not match certificate")
    lhs = cert.S * cert.S * R
    rhs = cert.P * (cert.P - cert.alpha)
    diff = lhs - rhs
    exact = R.is_exact and cert.exact
    res = max((abs(float(c)) for c in diff.coeffs), default=0.0)
    scale = max(1.0, rhs.max_abs_coeff())
    if exact:
        return CertificateCheck(diff.is_zero(), res, res / scale, True)
    return CertificateCheck(res / scale < tol, res, res / scale, False)


def _nullspace_exact(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    a = [[Fraction(v) for v in row] for row in rows]
    ncols = len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [v / p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][free]
        basis.append(v)
    return basis


def certificate_from_matrix(spec, m: int, n: int | None = None) -> Certificate:
    """Certificate read off a kernel vector of the rank-deficient matrix.

    The kernel vector holds the coefficients of ``s(t)``; ``g = s f`` then
    gives ``q`` (degrees below ``m``) and ``alpha = 2 g_m``.

    Raises ``ValueError`` when the matrix has full rank.
    """
    if isinstance(spec, Poly):
        R = spec
        n = R.degree // 2 if n is None else n
        series = taylor_coeffs_from_r(r_poly(R), 2 * m)
    else:
        gam = _gammas_of(spec)
        n = (len(gam) + 1) // 2
        series = taylor_coeffs(gam, 2 * m)
    mat = cayley_matrix(series, m, n)
    k = m - n
    if series.exact:
        basis = _nullspace_exact(mat.entries)
        if not basis:
            raise ValueError("matrix has full rank: no certificate")
        vec = next((v for v in basis if v[0] != 0), None)
        if vec is None:
            raise ValueError("kernel vectors all have s(0) = 0")
        s = [v / vec[0] for v in vec]
    else:
        a = mat.to_float()
        _, sv, vt = np.linalg.svd(a)
        vec = vt[-1]
        if abs(vec[0]) < 1e-12:
            raise ValueError("kernel vector has s(0) = 0")
        s = [float(v) for v in vec / vec[0]]
    f = series.coeffs
    g = [sum(s[j] * f[i - j] for j in range(min(i, k) + 1)) for i in range(m + 1)]
    S = Poly(list(reversed(s)))
    P = Poly(g[:m]).reversed(m) + 2 * g[m]
    return Certificate(m, n, S, P)


# ---------------------------------------------------------------- signatures
def signatures(m: int, n: int) -> list[tuple]:
    """All signatures: ``n`` nonnegative integers summing to ``m-n``."""
    k = m - n
    if k < 0:
        raise ValueError("elliptic period below dimension")
    out = []
    for bars in itertools.combinations(range(k + n - 1), n - 1):
        prev, tau = -1, []
        for b in bars:
            tau.append(b - prev - 1)
            prev = b
        tau.append(k + n - 1 - prev - 1)
        out.append(tuple(tau))
    return out


def _check_tau(m: int, n: int, tau: Sequence[int]) -> tuple:
    tau = tuple(int(t) for t in tau)
    if len(tau) != n or any(t < 0 for t in tau) or sum(tau) != m - n:
        raise ValueError(f"invalid signature {tau} for m={m}, n={n}")
    return tau


def _pattern(m: int) -> list[tuple[str, int]]:
    """Descending groups of the interlacing order as (kind, size)."""
    groups = []
    if m % 2:
        groups.append(("a", 1))
        kind = "b"
    else:
        groups.append(("b", 1))
        kind = "a"
    remaining = {"a": m - (1 if m % 2 else 0), "b": m - 1 - (0 if m % 2 else 1)}
    while remaining["a"] or remaining["b"]:
        groups.append((kind, 2))
        remaining[kind] -= 2
        kind = "a" if kind == "b" else "b"
    return groups


def ordering_partition(alphas: Sequence, betas: Sequence) -> bool:
    """True iff roots of ``P`` (alphas) and of ``P - P(0)`` (betas) interlace.

    Reading from the largest value down, ``m`` odd gives the groups
    ``a | b b | a a | ... | a a`` and ``m`` even gives
    ``b | a a | b b | ... | a a``; groups are strictly separated and the two
    members of a group may coincide.
    """
    m = len(alphas)
    if m < 1 or len(betas) != m - 1:
        return False
    if any(v <= 0 for v in list(alphas) + list(betas)):
        return False
    A = sorted(alphas, reverse=True)
    B = sorted(betas, reverse=True)
    ia = ib = 0
    chain = []
    for kind, size in _pattern(m):
        src, idx = (A, ia) if kind == "a" else (B, ib)
        chain.append(src[idx: idx + size])
        if kind == "a":
            ia += size
        else:
            ib += size
    return all(min(g) > max(h) for g, h in zip(chain, chain[1:]))


@dataclass(frozen=True)
class Decomposition:
    """``J, K`` split ``1..2n-1``; ``V, W`` split the double-root labels ``1..m-n``."""

    J: tuple
    K: tuple
    V: tuple
    W: tuple


def decomposition_from_signature(m: int, n: int, tau: Sequence[int],
                                 placement: Sequence | None = None) -> Decomposition:
    """Read the decomposition off the ordering pattern with synthetic values.

    The gammas are replaced by ``2(2n-i)`` and ``tau_r`` doubled markers are
    put in gap ``r``; ``placement`` optionally gives the markers' relative
    positions in ``(0, 1)`` (one list per gap).
    """
    tau = _check_tau(m, n, tau)
    gam = [Fraction(2 * (2 * n - i)) for i in range(1, 2 * n)] + [Fraction(0)]
    items = [(g, "g", i + 1) for i, g in enumerate(gam[:-1])]
    label = 0
    for r in range(1, n + 1):
        lo, hi = gam[2 * r - 1], gam[2 * r - 2]
        if placement is not None:
            rel = sorted((Fraction(p) for p in placement[r - 1]), reverse=True)
            if len(rel) != tau[r - 1] or any(not 0 < p < 1 for p in rel):
                raise ValueError("placement must give tau_r values in (0, 1) per gap")
        else:
            rel = [Fraction(tau[r - 1] - k + 1, tau[r - 1] + 1) for k in range(1, tau[r - 1] + 1)]
        for p in rel:
            label += 1
            d = lo + (hi - lo) * p
            items += [(d, "d", label), (d, "d", label)]
    items.sort(key=lambda t: (-t[0], t[1], t[2]))
    J, K, V, W = [], [], [], []
    pos = 0
    for kind, size in _pattern(m):
        group = items[pos: pos + size]
        pos += size
        for val, what, idx in group:
            if what == "g":
                (J if kind == "a" else K).append(idx)
        dl = [idx for _, what, idx in group if what == "d"]
        for idx in set(dl):
            if dl.count(idx) != 2:
                raise ValueError(f"signature {tau} splits a double root across groups")
            (V if kind == "a" else W).append(idx)
    return Decomposition(tuple(sorted(J)), tuple(sorted(K)), tuple(sorted(V)), tuple(sorted(W)))


def _gap_of_deltas(n: int, tau: Sequence[int]) -> list[int]:
    """1-based gap index for each double root label, largest root first."""
    out = []
    for r, t in enumerate(tau, start=1):
        out += [r] * t
    return out


def _check_deltas_in_gaps(gam_ext: Sequence, tau, deltas: Sequence) -> None:
    gaps = _gap_of_deltas(len(tau), tau)
    if len(deltas) != len(gaps):
        raise ValueError(f"expected {len(gaps)} double roots, got {len(deltas)}")
    for d, r in zip(deltas, gaps):
        if not gam_ext[2 * r - 1] < d < gam_ext[2 * r - 2]:
            raise ValueError("double roots outside their prescribed gaps")


def power_sum_residual(spec, tau: Sequence[int], deltas: Sequence = ()) -> list:
    """``sum_J g^l + 2 sum_V d^l - sum_K g^l - 2 sum_W d^l`` for ``l = 1..m-1``.

    ``deltas`` are sorted internally, largest first (label 1).
    """
    gam = _gammas_of(spec)
    n = (len(gam) + 1) // 2
    tau = tuple(tau)
    m = n + sum(tau)
    dec = decomposition_from_signature(m, n, tau)
    ds = sorted(deltas, reverse=True)
    zero = 0 if all(is_exact_number(g) for g in gam) else 0.0
    _check_deltas_in_gaps(list(gam) + [zero], tau, ds)
    out = []
    for l in range(1, m):
        v = sum(gam[j - 1] ** l for j in dec.J) - sum(gam[k - 1] ** l for k in dec.K)
        v += 2 * sum(ds[i - 1] ** l for i in dec.V) - 2 * sum(ds[i - 1] ** l for i in dec.W)
        out.append(v)
    return out


def certificate_from_deltas(spec, tau: Sequence[int], deltas: Sequence = ()) -> Certificate:
    """``S = prod(x - delta)`` and ``P = prod_J (x - gamma) prod_V (x - delta)^2``."""
    gam = _gammas_of(spec)
    n = (len(gam) + 1) // 2
    m = n + sum(tau)
    dec = decomposition_from_signature(m, n, tau)
    ds = sorted(deltas, reverse=True)
    S = Poly.from_roots(ds)
    P = Poly.from_roots([gam[j - 1] for j in dec.J] + [ds[v - 1] for v in dec.V] * 2)
    return Certificate(m, n, S, P)


# ---------------------------------------------------------------- root structure
@dataclass(frozen=True)
class RootReport:
    """Root structure of a certificate.

    ``tau`` counts the real roots of ``S`` per gap; ``nonreal`` is the number
    of non-real roots of ``S`` (evidence on the all-real-roots conjecture when
    ``m > n + 3``).
    """

    squarefree: bool
    s_real_roots: tuple
    tau: tuple
    all_in_gaps: bool
    p_real_count: int
    p_shift_real_count: int
    nonreal: int
    asserted: bool
    ok: bool = field(default=True)


def _spectrum_gammas_float(spec) -> list[float]:
    if isinstance(spec, Poly):
        roots = real_roots(spec)
        return sorted((float(r) for r, _ in roots if r != 0), reverse=True)
    return [float(g) for g in _gammas_of(spec)]


def certificate_root_structure(cert: Certificate, spec) -> RootReport:
    """Check the root structure every certificate must have.

    Raises ``AssertionError`` when a property fails and ``m <= n + 3``, where
    all roots of ``S`` are known to be real.
    """
    S, P = cert.S, cert.P
    exact = cert.exact
    n, m = cert.n, cert.m
    gam = _spectrum_gammas_float(spec) + [0.0]
    if S.degree == 0:
        sroots, nreal_with_mult = [], 0
        squarefree = True
    elif exact:
        squarefree = poly_gcd(S, S.deriv()).degree == 0
        rr = real_roots(S)
        sroots = [float(r) for r, k in rr for _ in range(k)]
        nreal_with_mult = len(sroots)
    else:
        zs = np.roots(S.to_numpy()[::-1])
        sroots = sorted(float(z.real) for z in zs if abs(z.imag) <= 1e-9 * max(1.0, abs(z)))
        nreal_with_mult = len(sroots)
        squarefree = len(set(np.round(sroots, 9))) == len(sroots)
    nonreal = S.degree - nreal_with_mult
    counts = [0] * n
    inside = True
    for x in sroots:
        for r in range(1, n + 1):
            if gam[2 * r - 1] < x < gam[2 * r - 2]:
                counts[r - 1] += 1
                break
        else:
            inside = False

    def count(p):
        if exact:
            return sum(k for _, k in real_roots(p))
        return sum(k for _, k in real_roots(p.to_float()))

    pc = count(P)
    pz = count(P - cert.alpha)
    asserted = m <= n + 3
    ok = squarefree and inside and pc == pz and (nonreal == 0 or not asserted)
    report = RootReport(squarefree, tuple(sroots), tuple(counts), inside, pc, pz, nonreal, asserted, ok)
    if asserted and not ok:
        raise AssertionError(f"certificate root structure violated: {report}")
    if nonreal and not asserted:
        log.warning("S has %d non-real roots (m=%d, n=%d): %r", nonreal, m, n, S)
    return report


# ---------------------------------------------------------------- Newton solver
@dataclass(frozen=True)
class SignatureSolution:
    """One converged solution of the power-sum system for a signature.

    ``deltas`` are listed largest first; ``residual`` is the sup-norm of the
    residual after rescaling the largest axis gamma to 1.
    """

    type_vector: tuple
    tau: tuple
    caustics: CausticSet
    caustic_gammas: tuple
    deltas: tuple
    residual: float
    spectrum: MergedSpectrum
    certificate: Certificate
    certificate_check: CertificateCheck
    exact: bool
    hp_residual: float | None = None

    @property
    def m(self) -> int:
        return self.certificate.m


def _slots(n: int, type_vector: Sequence[int]) -> list[tuple[str, int]]:
    """Slots of the merged spectrum in decreasing gamma order."""
    keys = [((j, 0, 0), ("axis", j)) for j in range(1, n + 1)]
    keys += [((s, 1, k), ("caustic", k)) for k, s in enumerate(type_vector, start=1)]
    keys.sort()
    # increasing c is decreasing gamma
    return [slot for _, slot in keys]


class _System:
    """Power-sum residuals in the unknowns (caustic gammas, deltas), rescaled."""

    def __init__(self, axes: Sequence, type_vector, tau):
        self.n = len(axes)
        self.tau = tuple(tau)
        self.m = self.n + sum(self.tau)
        self.type_vector = tuple(type_vector)
        self.slots = _slots(self.n, type_vector)
        self.dec = decomposition_from_signature(self.m, self.n, self.tau)
        self.sign = {}
        for j in self.dec.J:
            self.sign[j] = 1
        for k in self.dec.K:
            self.sign[k] = -1
        self.dsign = {}
        for v in self.dec.V:
            self.dsign[v] = 2
        for w in self.dec.W:
            self.dsign[w] = -2
        self.gaps = _gap_of_deltas(self.n, self.tau)
        self.nc = self.n - 1
        self.nd = self.m - self.n

    def gammas(self, axis_g, u):
        out = []
        for kind, idx in self.slots:
            out.append(axis_g[idx - 1] if kind == "axis" else u[idx - 1])
        return out

    def residual(self, axis_g, u, power=None):
        gam = self.gammas(axis_g, u)
        ds = u[self.nc:]
        res = []
        for l in range(1, self.m):
            v = sum(self.sign[i + 1] * (g**l if power is None else power(g, l)) for i, g in enumerate(gam))
            v += sum(self.dsign[i + 1] * (d**l if power is None else power(d, l)) for i, d in enumerate(ds))
            res.append(v)
        return res

    def jacobian(self, axis_g, u):
        pos = {idx: i + 1 for i, (kind, idx) in enumerate(self.slots) if kind == "caustic"}
        rows = []
        for l in range(1, self.m):
            row = []
            for k in range(1, self.nc + 1):
                row.append(self.sign[pos[k]] * l * u[k - 1] ** (l - 1))
            for i, d in enumerate(u[self.nc:]):
                row.append(self.dsign[i + 1] * l * d ** (l - 1))
            rows.append(row)
        return rows

    def feasible(self, axis_g, u, rel: float = 0.0) -> bool:
        gam = self.gammas(axis_g, u) + [0.0]
        if any(not (b < a) for a, b in zip(gam, gam[1:])):
            return False
        ds = list(u[self.nc:])
        if any(not (b < a) for a, b in zip(ds, ds[1:])):
            return False
        for d, r in zip(ds, self.gaps):
            lo, hi = gam[2 * r - 1], gam[2 * r - 2]
            if not lo < d < hi:
                return False
            if rel and min(d - lo, hi - d) <= rel * max(1.0, abs(d)):
                return False
        return True

    def lambda_intervals(self, axes):
        ext = [0.0] + list(axes)
        return [(ext[s], ext[s + 1]) for s in self.type_vector]

    def seed(self, axes, rng, first: bool):
        axis_g = [1.0 / a for a in axes]
        lam = []
        groups = {}
        for k, s in enumerate(self.type_vector):
            groups.setdefault(s, []).append(k)
        lam = [0.0] * self.nc
        for s, ks in groups.items():
            lo, hi = ([0.0] + list(axes))[s], list(axes)[s]
            if first:
                vals = [lo + (hi - lo) * (i + 1) / (len(ks) + 1) for i in range(len(ks))]
            else:
                vals = sorted(rng.uniform(lo, hi, size=len(ks)))
            for k, v in zip(ks, vals):
                lam[k] = v
        u = [1.0 / v for v in lam]
        gam = self.gammas(axis_g, u) + [0.0]
        ds = []
        for r in range(1, self.n + 1):
            t = self.tau[r - 1]
            lo, hi = gam[2 * r - 1], gam[2 * r - 2]
            if first:
                vals = [lo + (hi - lo) * (t - i) / (t + 1) for i in range(t)]
            else:
                vals = sorted(rng.uniform(lo, hi, size=t), reverse=True)
            ds += list(vals)
        return u + ds


def _newton_float(sysm: _System, axis_g, u0, max_iter: int, tol: float):
    u = np.array(u0, dtype=float)
    F = np.array(sysm.residual(axis_g, u))
    norm = np.max(np.abs(F))
    trace = [norm]
    for _ in range(max_iter):
        if norm < tol:
            return u, norm, trace
        Jm = np.array(sysm.jacobian(axis_g, u))
        try:
            step = np.linalg.solve(Jm, -F)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(Jm, -F, rcond=None)[0]
        t = 1.0
        for _ in range(30):
            cand = u + t * step
            if np.all(cand > 0):
                Fc = np.array(sysm.residual(axis_g, cand))
                nc = np.max(np.abs(Fc))
                if nc < norm:
                    break
            t *= 0.5
        else:
            return u, norm, trace
        u, F, norm = cand, Fc, nc
        trace.append(norm)
    return u, norm, trace


def _polish_mp(sysm: _System, axis_g_exact, u, dps: int = 60, iters: int = 12):
    with mpmath.workdps(dps):
        ag = [mpmath.mpf(g.numerator) / g.denominator for g in axis_g_exact]
        x = mpmath.matrix([mpmath.mpf(float(v)) for v in u])
        for _ in range(iters):
            xs = [x[i] for i in range(len(u))]
            F = mpmath.matrix(sysm.residual(ag, xs))
            Jm = mpmath.matrix(sysm.jacobian(ag, xs))
            dx = mpmath.lu_solve(Jm, -F)
            x = x + dx
            if mpmath.norm(dx, mpmath.inf) < mpmath.mpf(10) ** (-dps + 8):
                break
        xs = [x[i] for i in range(len(u))]
        res = max(abs(v) for v in sysm.residual(ag, xs)) if sysm.m > 1 else mpmath.mpf(0)
        return xs, res


def _try_rational(values, bound: int = 10**9):
    out = []
    for v in values:
        fr = Fraction(mpmath.nstr(v, 50, strip_zeros=False)) if not isinstance(v, float) else Fraction(v)
        out.append(fr.limit_denominator(bound))
    return out


def _assemble(sysm: _System, e: Ellipsoid, u, exact_vals=None, hp=None, hp_vals=None):
    nc = sysm.nc
    if exact_vals is not None:
        cg = exact_vals[:nc]
        ds = exact_vals[nc:]
        lam = [1 / g for g in cg]
        cs = existence_check(e, sorted(lam))
        spec = MergedSpectrum.from_caustics(e, cs)
    else:
        cg = [float(v) for v in u[:nc]]
        ds = [float(v) for v in u[nc:]]
        ef = e if not e.exact else Ellipsoid([float(a) for a in e.axes])
        cs = existence_check(ef, sorted(1.0 / g for g in cg))
        spec = MergedSpectrum.from_caustics(ef, cs)
    if tuple(cs.type_vector) != sysm.type_vector:
        raise SpuriousRoot("converged caustics changed type")
    cert = certificate_from_deltas(spec, sysm.tau, ds)
    check = verify_certificate(spec, cert)
    if hp_vals is not None:
        # high-precision confirmation of the identity for irrational solutions
        with mpmath.workdps(60):
            agm = [mpmath.mpf(Fraction(a).numerator) / Fraction(a).denominator for a in e.axes]
            gm = sysm.gammas([1 / a for a in agm], hp_vals[:nc])
            dm = list(hp_vals[nc:])
            specP = Poly.from_roots([mpmath.mpf(0)] + gm)
            dec = sysm.dec
            S = Poly.from_roots(dm)
            P = Poly.from_roots([gm[j - 1] for j in dec.J] + [dm[v - 1] for v in dec.V] * 2)
            diff = S * S * specP - P * (P - P[0])
            hp = float(max((abs(c) for c in diff.coeffs), default=mpmath.mpf(0)))
    return cs, spec, tuple(cg), tuple(ds), cert, check, hp


def _solution_key(sol_u, nd):
    return tuple(float(v) for v in sol_u)


def _solve(e: Ellipsoid, type_vector, tau, seed, restarts, max_iter, tol, collect_all):
    n = e.n
    tv = tuple(type_vector)
    if len(tv) != n - 1:
        raise ValueError("caustic type vector has wrong length")
    tau = _check_tau(n + sum(tau), n, tau)
    sysm = _System([float(a) for a in e.axes], tv, tau)
    axes = [float(a) for a in e.axes]
    scale = 1.0 / axes[0]
    axis_gn = [1.0 / a / scale for a in axes]
    rng = np.random.default_rng(seed)
    trace = []
    found = []
    for attempt in range(restarts):
        u0 = np.array(sysm.seed(axes, rng, first=(attempt == 0))) / scale
        u, norm, tr = _newton_float(sysm, axis_gn, u0, max_iter, tol)
        trace.append((attempt, tr[-1], len(tr)))
        if norm >= tol:
            continue
        if not sysm.feasible(axis_gn, list(u), rel=1e-8):
            trace.append((attempt, "spurious root", list(u * scale)))
            continue
        u = u * scale
        if any(np.max(np.abs(u - f[0]) / np.maximum(1.0, np.abs(u))) < 1e-8 for f in found):
            continue
        found.append((u, norm))
        if not collect_all:
            break
    if not found:
        raise NoConvergence(
            f"no convergence for type {caustic_type_label(tv)}, tau={tau} after {restarts} starts",
            trace,
        )
    sols = []
    for u, norm in found:
        exact_vals = hp = hp_vals = None
        if e.exact:
            hp_vals, hp_res = _polish_mp(sysm, [1 / Fraction(a) for a in e.axes], list(u))
            cand = _try_rational(hp_vals)
            ex_res = sysm.residual([1 / Fraction(a) for a in e.axes], cand)
            if all(v == 0 for v in ex_res) and sysm.feasible(
                    [1 / Fraction(a) for a in e.axes], cand):
                exact_vals = cand
            else:
                u = np.array([float(v) for v in hp_vals])
        try:
            cs, spec, cg, ds, cert, check, hp = _assemble(sysm, e, u, exact_vals, hp, hp_vals)
        except (ValueError, SpuriousRoot) as exc:
            trace.append(("assemble", str(exc)))
            continue
        sols.append(SignatureSolution(tv, tau, cs, cg, ds, float(norm), spec, cert, check,
                                      exact_vals is not None, hp))
    if not sols:
        raise SpuriousRoot("all converged points violate the constraints")
    return sols


def solve_signature(e: Ellipsoid, type_vector: Sequence[int], tau: Sequence[int], seed=0, *,
                    restarts: int = 8, max_iter: int = 200, tol: float = 1e-12) -> SignatureSolution:
    """Find caustics of the given type closing with signature ``tau``.

    Damped Newton on the power-sum residuals (caustic gammas and double roots
    as unknowns), restarted from jittered seeds.  Rational axes trigger a
    high-precision polish; an exactly rational solution yields an exact
    certificate, otherwise ``hp_residual`` records the certificate identity
    residual at 60 digits.

    Raises
    ------
    NoConvergence
        No seed reached the residual target ``tol``.
    SpuriousRoot
        Every converged point broke the ordering or gap constraints.
    """
    return _solve(e, type_vector, tau, seed, restarts, max_iter, tol, False)[0]


def solve_signature_all(e: Ellipsoid, type_vector: Sequence[int], tau: Sequence[int], seed=0, *,
                        restarts: int = 64, max_iter: int = 200,
                        tol: float = 1e-12) -> list[SignatureSolution]:
    """All distinct solutions found from ``restarts`` seeds (deduplicated at 1e-8)."""
    return _solve(e, type_vector, tau, seed, restarts, max_iter, tol, True)
