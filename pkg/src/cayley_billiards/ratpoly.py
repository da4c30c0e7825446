"""Exact rational arithmetic and dense univariate polynomials.

Coefficients are stored lowest degree first.  A polynomial is *exact* when
every coefficient is an ``int`` or a :class:`fractions.Fraction`; otherwise it
is treated as a binary64 float mirror and every comparison takes an explicit
tolerance.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Fraction",
    "Poly",
    "as_exact",
    "elementary_symmetric",
    "is_exact_number",
    "poly_gcd",
    "poly_sqrt",
    "rank_exact",
    "rank_float",
    "real_roots",
    "sign_variations",
    "squarefree_decomposition",
    "sturm_chain",
]

DEFAULT_TOL = 1e-9
DEFAULT_WIDTH = Fraction(1, 2**60)


def is_exact_number(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def as_exact(x) -> Fraction:
    """Convert ``int``/``Fraction``/decimal string ``"p/q"`` to a Fraction."""
    if isinstance(x, str):
        return Fraction(x.strip())
    if is_exact_number(x):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class Poly:
    """Immutable dense polynomial, coefficients lowest degree first.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # construction ---------------------------------------------------------
    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "Poly":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "Poly":
        return cls([0] * degree + [coeff])

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    # basic properties -----------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_exact(self) -> bool:
        return all(is_exact_number(c) for c in self.coeffs)

    def __getitem__(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = Poly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ")

    # arithmetic -----------------------------------------------------------
    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __add__(self, other):
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out, base = Poly([1]), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other):
        other = _lift(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), Poly(rem)
        quot = [0] * (dq + 1)
        lead = other.lead
        exact = self.is_exact and other.is_exact
        for k in range(dq, -1, -1):
            c = rem[k + other.degree]
            c = Fraction(c) / lead if exact else c / lead
            quot[k] = c
            if c == 0:
                continue
            for j, b in enumerate(other.coeffs):
                rem[k + j] -= c * b
            rem[k + other.degree] = 0
        return Poly(quot), Poly(rem[: other.degree])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def scale(self, c) -> "Poly":
        return Poly(c * a for a in self.coeffs)

    def deriv(self) -> "Poly":
        return Poly(k * c for k, c in enumerate(self.coeffs) if k)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = Fraction(self.lead) if self.is_exact else self.lead
        return Poly(c / lead for c in self.coeffs)

    def reversed(self, degree: int | None = None) -> "Poly":
        """Return ``x**degree * p(1/x)`` (the t <-> 1/x change of variable)."""
        d = self.degree if degree is None else degree
        if d < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        cs = list(self.coeffs) + [0] * (d - self.degree)
        return Poly(reversed(cs))

    def rescale_variable(self, sigma) -> "Poly":
        """Return ``p(sigma * x)``."""
        return Poly(c * sigma**k for k, c in enumerate(self.coeffs))

    def to_float(self) -> "Poly":
        return Poly(float(c) for c in self.coeffs)

    def to_numpy(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self.coeffs), default=0.0)


def _lift(p) -> Poly:
    return p if isinstance(p, Poly) else Poly([p])


def elementary_symmetric(values: Sequence, l: int):
    """Elementary symmetric polynomial ``e_l`` of ``values``.

    ``e_0 = 1`` and ``e_l = 0`` for ``l > len(values)``.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    if l > len(values):
        return 0
    e = [1] + [0] * l
    for v in values:
        for k in range(l, 0, -1):
            e[k] += e[k - 1] * v
    return e[l]


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd of two exact polynomials (Euclid over the rationals)."""
    if not (p.is_exact and q.is_exact):
        raise TypeError("poly_gcd needs exact polynomials")
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = lead * prod(f_k ** k)`` with each ``f_k`` squarefree."""
    if p.is_zero():
        raise ValueError("undefined root set")
    out = []
    a = p.monic()
    if a.degree == 0:
        return out
    b = a.deriv()
    c = poly_gcd(a, b)
    w = a // c
    y = b // c
    z = y - w.deriv()
    k = 1
    while w.degree > 0:
        g = poly_gcd(w, z)
        if g.degree > 0:
            out.append((g, k))
        w = w // g
        y = z // g
        z = y - w.deriv()
        k += 1
    return out


def sturm_chain(p: Poly) -> list[Poly]:
    chain = [p, p.deriv()]
    while not chain[-1].is_zero():
        r = -(chain[-2] % chain[-1])
        if r.is_zero():
            break
        chain.append(r)
    return chain


def sign_variations(chain: Sequence[Poly], x) -> int:
    """Sign variations of the chain at ``x``; ``x`` may be ``+-math.inf``."""
    signs = []
    for q in chain:
        if math.isinf(x) if isinstance(x, float) else False:
            v = q.lead * (1 if (x > 0 or q.degree % 2 == 0) else -1)
        else:
            v = q(x)
        if v != 0:
            signs.append(v > 0)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _cauchy_bound(p: Poly) -> Fraction:
    lead = abs(Fraction(p.lead))
    return 1 + max(abs(Fraction(c)) / lead for c in p.coeffs[:-1]) if p.degree > 0 else Fraction(1)


def _isolate_exact(g: Poly, lo: Fraction, hi: Fraction, width: Fraction) -> list[Fraction]:
    """Roots of the squarefree ``g`` in ``(lo, hi]``; ``g(lo) != 0`` required."""
    chain = sturm_chain(g)
    qmax = max(1, int(math.isqrt(int(1 / (2 * width)))))

    def count(a, b):
        return sign_variations(chain, a) - sign_variations(chain, b)

    def refine(a, b):
        if g(b) == 0:
            return b
        sa = g(a) > 0
        while b - a > width:
            mid = (a + b) / 2
            v = g(mid)
            if v == 0:
                return mid
            if (v > 0) == sa:
                a = mid
            else:
                b = mid
        mid = (a + b) / 2
        cand = mid.limit_denominator(qmax)
        if a < cand <= b and g(cand) == 0:
            return cand
        return mid

    roots = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        k = count(a, b)
        if k == 0:
            continue
        if k == 1:
            roots.append(refine(a, b))
            continue
        for num in (1, 3, 2, 5, 4):
            mid = a + (b - a) * num / (num + 1 if num > 1 else 2)
            if g(mid) != 0:
                break
        else:
            mid = a + (b - a) / 7
        stack.append((a, mid))
        stack.append((mid, b))
    return sorted(roots)


def real_roots(p: Poly, interval: tuple | None = None, *, width=DEFAULT_WIDTH,
               tol: float = DEFAULT_TOL, cluster: float = 1e-6) -> list[tuple]:
    """Real roots of ``p`` in an open interval with multiplicities, increasing.

    Exact polynomials go through square-free decomposition and Sturm
    isolation, then bisection to ``width``; rational roots are recovered
    exactly, irrational ones are reported as the midpoint of their final
    interval.  Float polynomials use companion-matrix eigenvalues; roots
    closer than ``cluster`` (relative) are merged into one multiple root and
    a root is real when its imaginary part is below ``tol`` (relative).
    """
    if p.is_zero():
        raise ValueError("undefined root set")
    lo, hi = interval if interval is not None else (None, None)
    if p.is_exact:
        return _real_roots_exact(p, lo, hi, Fraction(width))
    return _real_roots_float(p, lo, hi, tol, cluster)


def _real_roots_exact(p, lo, hi, width):
    out = []
    for g, mult in squarefree_decomposition(p):
        bound = _cauchy_bound(g)
        a = -bound - 1 if lo is None else Fraction(lo)
        b = bound + 1 if hi is None else Fraction(hi)
        if a >= b:
            continue
        if g(a) == 0:
            # shift off an endpoint root; the open interval excludes it
            a = a + min(width, (b - a) / 4)
            while g(a) == 0:
                a = (a + b) / 2
        for r in _isolate_exact(g, a, b, width):
            if hi is not None and r >= Fraction(hi):
                continue
            out.append((r, mult))
    out.sort(key=lambda t: t[0])
    return out


def _real_roots_float(p, lo, hi, tol, cluster):
    cs = p.to_numpy()
    if len(cs) == 1:
        return []
    zs = list(np.roots(cs[::-1]))
    zs.sort(key=lambda z: (z.real, z.imag))
    groups: list[list[complex]] = []
    for z in zs:
        for grp in groups:
            c = np.mean(grp)
            if abs(z - c) <= cluster * max(1.0, abs(c)):
                grp.append(z)
                break
        else:
            groups.append([z])
    out = []
    for grp in groups:
        c = complex(np.mean(grp))
        if abs(c.imag) > tol * max(1.0, abs(c.real)) and len(grp) == 1:
            continue
        if abs(c.imag) > max(tol, cluster) * max(1.0, abs(c.real)):
            continue
        r = c.real
        if lo is not None and r <= lo:
            continue
        if hi is not None and r >= hi:
            continue
        out.append((r, len(grp)))
    out.sort(key=lambda t: t[0])
    return out


def poly_sqrt(p: Poly) -> tuple[Poly, Poly]:
    """Polynomial square root from the top coefficients.

    For monic ``p`` of even degree ``2k`` returns ``(q, p - q*q)`` with ``q``
    monic of degree ``k`` chosen so that the remainder has degree ``< k``;
    ``p`` is a perfect square iff the remainder is zero.
    """
    if p.is_zero() or p.degree % 2:
        raise ValueError("poly_sqrt needs an even-degree polynomial")
    p = p.monic()
    k = p.degree // 2
    exact = p.is_exact
    rev = list(reversed(p.coeffs))  # rev[j] = coefficient of x^(2k-j)
    q = [Fraction(1) if exact else 1.0]  # q[j] = coefficient of x^(k-j)
    for j in range(1, k + 1):
        acc = rev[j] - sum(q[i] * q[j - i] for i in range(1, j))
        q.append(acc / 2)
    qp = Poly(reversed(q))
    return qp, p - qp * qp


def rank_exact(matrix: Sequence[Sequence]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination."""
    rows = [list(r) for r in matrix]
    if not rows or not rows[0]:
        raise ValueError("empty matrix")
    ncols = len(rows[0])
    m = []
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
        fr = [as_exact(x) for x in r]
        den = math.lcm(*(x.denominator for x in fr))
        m.append([int(x * den) for x in fr])
    nrows = len(m)
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pv = m[rank][col]
        for r in range(rank + 1, nrows):
            f = m[r][col]
            for c in range(col + 1, ncols):
                num = m[r][c] * pv - f * m[rank][c]
                q, rem = divmod(num, prev)
                assert rem == 0, "Bareiss division not exact"
                m[r][c] = q
            m[r][col] = 0
        prev = pv
        rank += 1
        if rank == nrows:
            break
    return rank


def rank_float(matrix, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank: singular values above ``tol`` times the largest one."""
    a = np.asarray(matrix, dtype=float)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))
