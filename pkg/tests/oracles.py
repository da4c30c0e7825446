"""Independent reference computations used only by the tests."""
from fractions import Fraction


def binomial_half(k: int) -> Fraction:
    """Generalized binomial coefficient C(1/2, k)."""
    out = Fraction(1)
    for i in range(k):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


def sqrt_product_series(gammas, L: int) -> list:
    """Coefficients of prod sqrt(1 - g t) as a product of binomial series."""
    series = [Fraction(1)] + [Fraction(0)] * L
    for g in gammas:
        factor = [binomial_half(k) * (-Fraction(g)) ** k for k in range(L + 1)]
        series = [sum(series[i] * factor[l - i] for i in range(l + 1)) for l in range(L + 1)]
    return series


def m3_factors(g1, g2, g3):
    q0 = g1 * g1 + g2 * g2 + g3 * g3 - 2 * g1 * g2 - 2 * g1 * g3 - 2 * g2 * g3

    def qk(k, i, j):
        return 3 * k * k - 2 * (i + j) * k - (i - j) ** 2

    return q0 * qk(g1, g2, g3) * qk(g2, g1, g3) * qk(g3, g1, g2)


def m2_factors(g1, g2, g3):
    return (g1 - g2 - g3) * (g3 - g1 - g2) * (g2 - g3 - g1)
