"""Billiard dynamics inside an ellipsoid of R^n.

Bounces are computed in binary64.  Along each chord the caustic parameters
are recovered from the tangency polynomial, closure is detected up to
coordinate reflections, and winding numbers are counted from the
oscillations of the elliptic coordinates.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import least_squares

from .confocal import (
    CausticError,
    CausticSet,
    Ellipsoid,
    MergedSpectrum,
    existence_check,
    to_elliptic_many,
)

__all__ = [
    "BilliardState",
    "ClosureRecord",
    "GrazingSegment",
    "LaunchFailure",
    "OscillationUnresolved",
    "TangencyError",
    "Trajectory",
    "WindingResult",
    "caustic_drift",
    "detect_closure",
    "export_csv",
    "export_svg",
    "launch_tangent",
    "line_caustics",
    "poncelet_relaunch",
    "reflect",
    "reflect_step",
    "simulate",
    "tangency_poly",
    "winding_numbers",
]


class GrazingSegment(RuntimeError):
    """The chord is tangent to the boundary."""


class LaunchFailure(RuntimeError):
    """No inward direction tangent to the prescribed caustics was found."""


class TangencyError(RuntimeError):
    """The tangency polynomial has fewer than n-1 real roots."""


@dataclass(frozen=True)
class BilliardState:
    """Point on the boundary and unit direction of the outgoing chord."""

    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=float))


def _axes(e: Ellipsoid) -> np.ndarray:
    return e.float_axes()


def outward_normal(e: Ellipsoid, x) -> np.ndarray:
    g = np.asarray(x, dtype=float) / _axes(e)
    return g / np.linalg.norm(g)


def reflect(e: Ellipsoid, x, v) -> np.ndarray:
    """Mirror ``v`` in the tangent hyperplane of the boundary at ``x``."""
    n = outward_normal(e, x)
    w = np.asarray(v, dtype=float) - 2.0 * float(np.dot(v, n)) * n
    return w / np.linalg.norm(w)


def reflect_step(e: Ellipsoid, s: BilliardState) -> tuple[BilliardState, float]:
    """Follow the chord to the far boundary point and reflect.

    Returns the new state and the chord length.  The far root of
    ``A s^2 + 2 B s + C = 0`` is taken as ``(-B + sqrt(B^2 - AC)) / A``,
    which has no cancellation for an inward direction (``B < 0``).
    """
    a = _axes(e)
    p, v = s.point, s.direction
    A = float(np.sum(v * v / a))
    B = float(np.sum(p * v / a))
    C = float(np.sum(p * p / a) - 1.0)
    disc = B * B - A * C
    if disc < 1e-14 * A * float(np.max(1.0 / a)):
        raise GrazingSegment("grazing segment")
    root = math.sqrt(disc)
    if B <= 0:
        t = (-B + root) / A
    else:
        # same root written without cancellation
        t = -C / (B + root)
        if t <= 0:
            raise ValueError("direction does not point into the ellipsoid")
    x = p + t * v
    x = x / math.sqrt(float(np.sum(x * x / a)))
    return BilliardState(x, reflect(e, x, v)), float(np.linalg.norm(x - p))


# ---------------------------------------------------------------- tangency
def _tangency_value(a: np.ndarray, p: np.ndarray, v: np.ndarray, lam: float) -> float:
    """``[(sum pv/(a-l))^2 - sum v^2/(a-l) (sum p^2/(a-l) - 1)] prod(a-l)``."""
    d = a - lam
    spv = np.sum(p * v / d)
    svv = np.sum(v * v / d)
    spp = np.sum(p * p / d)
    return float((spv * spv - svv * (spp - 1.0)) * np.prod(d))


def _tangency_coeffs_pairs(a: np.ndarray, p: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Same polynomial (up to sign) assembled term by term; used for polishing."""
    n = len(a)
    total = np.zeros(n)
    for i in range(n):
        prod = np.array([1.0])
        for j in range(n):
            if j != i:
                prod = npoly.polymul(prod, [a[j], -1.0])
        total[: len(prod)] += v[i] ** 2 * prod
    for i, j in itertools.combinations(range(n), 2):
        prod = np.array([1.0])
        for k in range(n):
            if k not in (i, j):
                prod = npoly.polymul(prod, [a[k], -1.0])
        w = (p[i] * v[j] - p[j] * v[i]) ** 2
        total[: len(prod)] -= w * prod
    return total


def tangency_poly(e: Ellipsoid, p, v) -> np.ndarray:
    """Coefficients (lowest first) of the cleared tangency polynomial in ``lambda``.

    Built by evaluation at ``n`` Chebyshev nodes of ``(0, a_1)`` and
    interpolation; its roots are the caustic parameters of the line.
    """
    a = _axes(e)
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    n = len(a)
    k = np.arange(n)
    nodes = 0.5 * a[0] * (1.0 - np.cos((2 * k + 1) * np.pi / (2 * n)))
    vals = np.array([_tangency_value(a, p, v, t) for t in nodes])
    return npoly.polyfit(nodes, vals, n - 1)


def line_caustics(e: Ellipsoid, p, v, tol: float = 1e-9) -> np.ndarray:
    """Caustic parameters of the line through ``p`` with direction ``v``, increasing."""
    a = _axes(e)
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    n = len(a)
    coeffs = tangency_poly(e, p, v)
    if n == 2:
        roots = np.array([-coeffs[0] / coeffs[1]])
    else:
        roots = npoly.polyroots(coeffs)
    scale = float(a[-1])
    real = sorted(r.real for r in roots if abs(r.imag) <= tol * max(scale, abs(r)))
    if len(real) < n - 1:
        raise TangencyError("tangency extraction failed")
    exact = _tangency_coeffs_pairs(a, p, v)
    dexact = npoly.polyder(exact)
    out = []
    for r in real:
        for _ in range(3):
            f = npoly.polyval(r, exact)
            df = npoly.polyval(r, dexact)
            if df == 0:
                break
            step = f / df
            r -= step
            if abs(step) <= 1e-16 * max(1.0, abs(r)):
                break
        out.append(r)
    return np.array(sorted(out))


# ---------------------------------------------------------------- launching
def _elliptic_frame_direction(a, x, mu, lams, signs):
    """Unit direction at ``x`` tangent to the caustics, from its elliptic frame.

    Along the normal of the confocal quadric through ``x`` with parameter
    ``mu_i`` the squared component is ``prod_k(lam_k - mu_i) / prod_{j!=i}(mu_j - mu_i)``.
    """
    n = len(a)
    v = np.zeros(n)
    for i in range(n):
        w = np.prod([lk - mu[i] for lk in lams]) / np.prod([mu[j] - mu[i] for j in range(n) if j != i])
        if w < -1e-12:
            return None
        N = x / (a - mu[i])
        v += signs[i] * math.sqrt(max(w, 0.0)) * N / np.linalg.norm(N)
    nv = np.linalg.norm(v)
    if not 0.5 < nv < 1.5:
        return None
    return v / nv


def _from_elliptic_array(a, mu):
    n = len(a)
    x = np.empty(n)
    for j in range(n):
        num = np.prod(a[j] - mu)
        den = np.prod([a[j] - a[i] for i in range(n) if i != j])
        x[j] = math.sqrt(max(num / den, 0.0))
    return x


def _check_launch(e, cs_params, state, tol):
    got = line_caustics(e, state.point, state.direction)
    want = np.array([float(v) for v in cs_params])
    return np.max(np.abs(got - want) / np.abs(want)) <= tol


def launch_tangent(e: Ellipsoid, caustics: CausticSet | Sequence, seed=0, *,
                   point=None, tries: int = 32, tol: float = 1e-10) -> BilliardState:
    """Initial state on the boundary whose chord is tangent to the given caustics.

    Without ``point`` a boundary point is drawn from ``seed`` in elliptic
    coordinates inside the ranges the trajectory visits, and the direction
    follows in closed form from the elliptic frame.  With ``point`` the
    direction is found by least squares on the tangency conditions over the
    inward hemisphere.  Every candidate is verified with :func:`line_caustics`.

    Raises
    ------
    LaunchFailure
        No admissible direction within ``tries`` seeded attempts, or caustic
        parameters within 1e-9 (relative) of an axis value.
    """
    a = _axes(e)
    lams = [float(v) for v in (caustics.params if isinstance(caustics, CausticSet) else caustics)]
    for lam in lams:
        if np.any(np.abs(a - lam) <= 1e-9 * a):
            raise LaunchFailure("launch failure: caustic parameter at an axis value")
    fe = Ellipsoid(list(a))
    cs = existence_check(fe, lams)
    spec = MergedSpectrum.from_caustics(fe, cs)
    rng = np.random.default_rng(seed)
    if point is not None:
        return _launch_at_point(e, np.asarray(point, dtype=float), lams, rng, tries, tol)
    intervals = spec.oscillation_intervals()
    n = e.n
    for _ in range(tries):
        mu = np.zeros(n)
        for i in range(1, n):
            lo, hi = intervals[i]
            mu[i] = lo + (hi - lo) * rng.uniform(0.05, 0.95)
        x = _from_elliptic_array(a, mu)
        sx = rng.choice([-1.0, 1.0], size=n)
        x = x * sx
        x = x / math.sqrt(float(np.sum(x * x / a)))
        signs = np.concatenate([[-1.0], rng.choice([-1.0, 1.0], size=n - 1)])
        v = _elliptic_frame_direction(a, x, mu, lams, signs)
        if v is None:
            continue
        st = BilliardState(x, v)
        if float(np.dot(v, x / a)) >= 0:
            continue
        try:
            if _check_launch(e, lams, st, tol):
                return st
        except TangencyError:
            continue
    raise LaunchFailure("launch failure: no tangent direction found")


def _launch_at_point(e, x, lams, rng, tries, tol):
    a = _axes(e)
    if abs(float(np.sum(x * x / a)) - 1.0) > 1e-9:
        raise ValueError("launch point is not on the ellipsoid")
    n = len(a)
    nrm = x / a
    nrm = nrm / np.linalg.norm(nrm)
    # orthonormal basis of the tangent hyperplane
    basis = np.linalg.svd(nrm[None, :])[2][1:]
    scale = float(a[-1]) ** (n - 1)

    def direction(u):
        t = basis.T @ u
        v = -nrm + t
        return v / np.linalg.norm(v)

    def resid(u):
        v = direction(u)
        return np.array([_tangency_value(a, x, v, lam) for lam in lams]) / scale

    for _ in range(tries):
        u0 = rng.normal(size=n - 1)
        sol = least_squares(resid, u0, xtol=1e-15, ftol=1e-15, gtol=1e-15, method="lm")
        st = BilliardState(x, direction(sol.x))
        try:
            if _check_launch(e, lams, st, tol):
                return st
        except TangencyError:
            continue
    raise LaunchFailure("launch failure: no tangent direction found")


# ---------------------------------------------------------------- trajectories
@dataclass
class ClosureRecord:
    """Closure data: Cartesian period ``m0``, elliptic period ``m`` and its sign vector."""

    m0: int
    m: int
    sigma: tuple
    d: int
    error: float
    error_elliptic: float
    length: float


@dataclass
class Trajectory:
    """Bounce sequence with per-chord caustic parameters and cumulative length."""

    ellipsoid: Ellipsoid
    states: list
    chord_lengths: list = field(default_factory=list)
    chord_caustics: list = field(default_factory=list)
    closure: ClosureRecord | None = None

    @property
    def cumulative_lengths(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.chord_lengths)])

    @property
    def bounces(self) -> int:
        return len(self.states) - 1


def _sign_vectors(n: int) -> list[np.ndarray]:
    return [np.array(s, dtype=float) for s in itertools.product((1.0, -1.0), repeat=n)]


def _match(s0: BilliardState, sk: BilliardState, sigma: np.ndarray) -> float:
    return max(float(np.max(np.abs(sk.point - sigma * s0.point))),
               float(np.max(np.abs(sk.direction - sigma * s0.direction))))


def detect_closure(t: Trajectory, tol: float = 1e-8) -> ClosureRecord | None:
    """Scan the stored bounces for closure; ``None`` means the trajectory is open.

    The first bounce ``k`` whose state equals ``sigma * state_0`` for some sign
    vector gives the elliptic period; the first with ``sigma = +1`` gives the
    Cartesian period ``m0``.
    """
    n = t.ellipsoid.n
    sigmas = _sign_vectors(n)
    s0 = t.states[0]
    m = sig = err_m = None
    for k in range(1, len(t.states)):
        sk = t.states[k]
        for sigma in sigmas:
            err = _match(s0, sk, sigma)
            if err < tol:
                if m is None:
                    m, sig, err_m = k, tuple(int(v) for v in sigma), err
                if np.all(sigma > 0):
                    d = k // m
                    if d * m != k or d not in (1, 2):
                        raise AssertionError(f"Cartesian period {k} is not 1 or 2 times elliptic period {m}")
                    length = float(np.sum(t.chord_lengths[:k]))
                    return ClosureRecord(k, m, sig, d, err, err_m, length)
    return None


def simulate(e: Ellipsoid, state: BilliardState, max_bounces: int = 1000,
             tol: float = 1e-8, stop_at_closure: bool = True) -> Trajectory:
    """Iterate the billiard map, recording chord caustics, until closure or ``max_bounces``."""
    t = Trajectory(e, [state])
    sigmas = _sign_vectors(e.n)
    s0 = state
    m = sig = err_m = None
    cur = state
    for k in range(1, max_bounces + 1):
        t.chord_caustics.append(line_caustics(e, cur.point, cur.direction))
        nxt, length = reflect_step(e, cur)
        t.states.append(nxt)
        t.chord_lengths.append(length)
        cur = nxt
        if t.closure is not None:
            continue
        for sigma in sigmas:
            err = _match(s0, nxt, sigma)
            if err < tol:
                if m is None:
                    m, sig, err_m = k, tuple(int(v) for v in sigma), err
                if np.all(sigma > 0):
                    d = k // m
                    if d * m != k or d not in (1, 2):
                        raise AssertionError(f"Cartesian period {k} is not 1 or 2 times elliptic period {m}")
                    t.closure = ClosureRecord(k, m, sig, d, err, err_m, float(np.sum(t.chord_lengths)))
                break
        if t.closure is not None and stop_at_closure:
            break
    return t


def caustic_drift(t: Trajectory) -> float:
    """Largest relative spread of the per-chord caustic parameters."""
    c = np.array(t.chord_caustics)
    if len(c) == 0:
        return 0.0
    spread = c.max(axis=0) - c.min(axis=0)
    return float(np.max(spread / np.abs(c.mean(axis=0))))


def poncelet_relaunch(e: Ellipsoid, caustics, count: int = 20, seed=0,
                      max_bounces: int = 1000, tol: float = 1e-8) -> list[ClosureRecord | None]:
    """Closure records of ``count`` trajectories launched from random boundary points.

    Launches are independent; they run one after another since each is a
    short pure computation.
    """
    rng = np.random.default_rng(seed)
    out = []
    for s in rng.integers(0, 2**32, size=count):
        st = launch_tangent(e, caustics, int(s))
        out.append(simulate(e, st, max_bounces, tol).closure)
    return out


# ---------------------------------------------------------------- winding numbers
@dataclass
class WindingResult:
    """Winding numbers over one Cartesian period.

    ``sampled`` are the oscillation counts of the elliptic coordinates,
    ``events`` the exact counts of endpoint contacts; ``decreasing`` records
    whether ``m_0 > m_1 > ... > m_{n-1} >= 2`` holds.
    """

    m: tuple
    m_tilde: tuple
    d: int
    events: tuple
    sampled: tuple
    parity_ok: bool
    decreasing: bool
    samples_per_chord: int
    mu_range_ok: bool


class OscillationUnresolved(RuntimeError):
    pass


def _count_oscillations(series: np.ndarray, lo: float, hi: float) -> int:
    width = hi - lo
    low_band = lo + 0.25 * width
    high_band = lo + 0.75 * width
    states = np.where(series <= low_band, -1, np.where(series >= high_band, 1, 0))
    states = states[states != 0]
    if len(states) == 0:
        return 0
    changes = int(np.sum(states != np.roll(states, 1)))
    return changes // 2


def _event_counts(e: Ellipsoid, states, lengths, spec: MergedSpectrum, lams) -> list[tuple[int, int]]:
    """Contacts of each elliptic coordinate with its interval ends over the period."""
    a = _axes(e)
    ext = [("zero", 0)] + [t for t in spec.tags]
    counts = []

    def contacts(tag):
        kind, idx = tag
        if kind == "zero":
            return len(lengths)
        if kind == "axis":
            # a chord crosses x_j = 0 at most once; bounces landing on it count too
            j = idx - 1
            eps = 1e-12 * math.sqrt(float(a[j]))
            signs = [np.sign(s.point[j]) for s in states[:-1] if abs(s.point[j]) > eps]
            if not signs:
                return 0
            return int(sum(x != y for x, y in zip(signs, signs[1:] + signs[:1])))
        lam = float(lams[idx - 1])
        total = 0
        for k, ell in enumerate(lengths):
            p, v = states[k].point, states[k].direction
            d = a - lam
            s = -float(np.sum(p * v / d)) / float(np.sum(v * v / d))
            if 0.0 < s < ell:
                total += 1
        return total

    for j in range(e.n):
        counts.append((contacts(ext[2 * j]), contacts(ext[2 * j + 1])))
    return counts


def winding_numbers(e: Ellipsoid, t: Trajectory, caustics: CausticSet | None = None,
                    samples: int = 256, range_tol: float = 1e-8) -> WindingResult:
    """Count oscillations of each elliptic coordinate over one Cartesian period.

    Each chord is sampled at ``samples`` points; a hysteresis with bands at
    25% and 75% of ``[c_{2j}, c_{2j+1}]`` counts round trips.  The counts are
    cross-checked against exact contact counts (bounces, caustic tangencies
    inside a chord, coordinate-hyperplane crossings); on disagreement the
    density is doubled up to 4x before giving up.
    """
    if t.closure is None:
        raise ValueError("trajectory is not closed")
    m0 = t.closure.m0
    states = t.states[: m0 + 1]
    lengths = t.chord_lengths[:m0]
    if caustics is None:
        lams = np.mean(np.array(t.chord_caustics[:m0]), axis=0)
        fe = Ellipsoid(list(_axes(e)))
        caustics = existence_check(fe, list(lams))
    lams = [float(v) for v in caustics.params]
    fe = Ellipsoid(list(_axes(e)))
    spec = MergedSpectrum.from_caustics(fe, existence_check(fe, lams))
    intervals = spec.oscillation_intervals()
    ev = _event_counts(e, states, lengths, spec, lams)
    if any(lo != hi for lo, hi in ev):
        raise OscillationUnresolved(f"contact counts differ at the two interval ends: {ev}")
    events = tuple(lo for lo, _ in ev)
    for factor in (1, 2, 4):
        ns = samples * factor
        pts = []
        for k in range(m0):
            s = np.linspace(0.0, lengths[k], ns, endpoint=False)
            pts.append(states[k].point[None, :] + s[:, None] * states[k].direction[None, :])
        mu = to_elliptic_many(e, np.vstack(pts))
        sampled = tuple(_count_oscillations(mu[:, j], *intervals[j]) for j in range(e.n))
        if sampled == events:
            break
    else:
        raise OscillationUnresolved("oscillation count unresolved")
    range_ok = all(
        np.all(mu[:, j] >= lo - range_tol * max(1.0, hi)) and np.all(mu[:, j] <= hi + range_tol * max(1.0, hi))
        for j, (lo, hi) in enumerate(intervals)
    )
    ms = sampled
    d = math.gcd(*ms)
    parity_ok = True
    for j in range(e.n):
        touches_axis = any(tag[0] == "axis" for tag in ([("zero", 0)] + list(spec.tags))[2 * j: 2 * j + 2])
        if touches_axis and ms[j] % 2:
            parity_ok = False
    if ms[0] != m0 or d != t.closure.d:
        raise AssertionError(f"winding numbers {ms} inconsistent with closure m0={m0}, d={t.closure.d}")
    decreasing = all(x > y for x, y in zip(ms, ms[1:])) and ms[-1] >= 2
    return WindingResult(ms, tuple(x // d for x in ms), d, events, sampled, parity_ok, decreasing,
                         samples * factor, bool(range_ok))


# ---------------------------------------------------------------- export
def export_csv(t: Trajectory, path) -> None:
    """One row per bounce: index, point, direction, chord caustics, cumulative length."""
    n = t.ellipsoid.n
    header = (["index"] + [f"x{j + 1}" for j in range(n)] + [f"v{j + 1}" for j in range(n)]
              + [f"lambda{k + 1}" for k in range(n - 1)] + ["cumulative_length"])
    cum = t.cumulative_lengths
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, st in enumerate(t.states):
            lam = t.chord_caustics[k] if k < len(t.chord_caustics) else [float("nan")] * (n - 1)
            row = [str(k)] + [f"{v:.17g}" for v in st.point] + [f"{v:.17g}" for v in st.direction]
            row += [f"{float(v):.17g}" for v in lam] + [f"{cum[k]:.17g}"]
            w.writerow(row)


def export_svg(t: Trajectory, caustic: float, path, size: int = 600) -> None:
    """Planar picture: boundary ellipse, confocal caustic and the bounce polyline."""
    e = t.ellipsoid
    if e.n != 2:
        raise ValueError("SVG export is planar only")
    b_, a_ = (float(v) for v in e.axes)  # x^2/b_ + y^2/a_ = 1 in stored order
    rx, ry = math.sqrt(b_), math.sqrt(a_)
    half = max(rx, ry) * 1.05
    sc = size / (2 * half)

    def tx(x, y):
        return f"{(x + half) * sc:.6f},{(half - y) * sc:.6f}"

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<ellipse cx="{half * sc:.6f}" cy="{half * sc:.6f}" rx="{rx * sc:.6f}" ry="{ry * sc:.6f}" '
        'fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    lam = float(caustic)
    if lam < b_:
        parts.append(
            f'<ellipse cx="{half * sc:.6f}" cy="{half * sc:.6f}" rx="{math.sqrt(b_ - lam) * sc:.6f}" '
            f'ry="{math.sqrt(a_ - lam) * sc:.6f}" fill="none" stroke="steelblue" stroke-dasharray="4 3"/>'
        )
    else:
        # hyperbola y^2/(a_-lam) - x^2/(lam-b_) = 1, clipped to the ellipse
        p, q = math.sqrt(a_ - lam), math.sqrt(lam - b_)
        for sy in (1.0, -1.0):
            pts = []
            for u in np.linspace(-3.0, 3.0, 241):
                x, y = q * math.sinh(u), sy * p * math.cosh(u)
                if x * x / b_ + y * y / a_ <= 1.0:
                    pts.append(tx(x, y))
            if pts:
                parts.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="steelblue" '
                             'stroke-dasharray="4 3"/>')
    poly = " ".join(tx(s.point[0], s.point[1]) for s in t.states)
    parts.append(f'<polyline points="{poly}" fill="none" stroke="firebrick" stroke-width="1"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
