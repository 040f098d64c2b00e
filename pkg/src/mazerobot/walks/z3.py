"""Closed-form return probabilities and bounds for the simple walk on Z^3."""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial, pi, sqrt

import numpy as np

from ..lattice import l1_norm


def _trinomial_square_sum(m: int) -> int:
    """Sum over i+j+l = m of (m!/(i! j! l!))^2."""
    total = 0
    for i in range(m + 1):
        ci = comb(m, i)
        for j in range(m - i + 1):
            t = ci * comb(m - i, j)
            total += t * t
    return total


def z3_origin_return_exact(n: int) -> Fraction:
    """P(Y_n = 0) for the simple walk on Z^3.

    Odd ``n`` gives 0. For ``n = 2m`` this is the sum over i+j+l = m of
    (2m)!/(i! j! l!)^2 / 6^(2m), evaluated with big integers using
    (2m)!/(i! j! l!)^2 = C(2m, m) (m!/(i! j! l!))^2.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n % 2:
        return Fraction(0)
    m = n // 2
    return Fraction(comb(2 * m, m) * _trinomial_square_sum(m), 36 ** m)


def z3_return_numerators(m_max: int) -> list[int]:
    """``a[m] = sum (m!/(i! j! l!))^2`` for m = 0..m_max via its three-term recurrence.

    m^2 a(m) = (10m^2 - 10m + 3) a(m-1) - 9 (m-1)^2 a(m-2); the division is
    exact. Used for long partial sums where the double sum gets slow.
    """
    a = [1, 3][: m_max + 1]
    for m in range(2, m_max + 1):
        num = (10 * m * m - 10 * m + 3) * a[-1] - 9 * (m - 1) ** 2 * a[-2]
        q, r = divmod(num, m * m)
        assert r == 0
        a.append(q)
    return a


def z3_return_partial_sum(n_max: int) -> Fraction:
    """S(n_max) = sum of P(Y_t = 0) over t = 0..n_max (the t = 0 term is 1)."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    mm = n_max // 2
    a = z3_return_numerators(mm)
    # Horner over the common denominator 36^mm
    total, central = 0, 1
    for m in range(mm + 1):
        if m:
            central = central * (2 * m) * (2 * m - 1) // (m * m)
        total = total * 36 + central * a[m]
    return Fraction(total, 36 ** mm)


def z3_first_return_cdf(n_max: int) -> list[float]:
    """P(first return to 0 at or before n), n = 0..n_max, in double precision.

    u_2m = C(2m,m)/4^m * a(m)/9^m runs forward through the same recurrence
    (the wanted solution dominates, so it is stable); first-return terms come
    from the renewal equation u_n = sum f_j u_(n-j).
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    mm = n_max // 2
    u = np.empty(mm + 1)
    b_prev, b, c = 0.0, 1.0, 1.0
    for m in range(mm + 1):
        if m:
            c *= (2 * m - 1) / (2 * m)
            b_prev, b = b, ((10 * m * m - 10 * m + 3) * b - (m - 1) ** 2 * b_prev) / (9 * m * m)
        u[m] = c * b
    f = np.zeros(mm + 1)
    for m in range(1, mm + 1):
        f[m] = u[m] - np.dot(f[1:m], u[m - 1:0:-1])
    even = np.cumsum(f)
    return [float(even[n // 2]) for n in range(n_max + 1)]


def z3_point_probability_exact(n: int, x) -> Fraction:
    """P(Y_n = x) for the simple walk on Z^3 by counting paths.

    Split the n steps into i_c steps along each axis c (multinomial), and
    among the i_c steps choose the (i_c + x_c)/2 positive ones.
    """
    x = tuple(int(c) for c in x)
    if len(x) != 3:
        raise ValueError("x must be a point of Z^3")
    if n < 0:
        raise ValueError("n must be non-negative")
    if (n - l1_norm(x)) % 2 or l1_norm(x) > n:
        return Fraction(0)
    ax = [abs(c) for c in x]
    paths = 0
    for i in range(ax[0], n + 1, 2):
        for j in range(ax[1], n - i + 1, 2):
            l = n - i - j
            if l < ax[2] or (l - ax[2]) % 2:
                continue
            mult = factorial(n) // (factorial(i) * factorial(j) * factorial(l))
            paths += (mult * comb(i, (i + ax[0]) // 2) * comb(j, (j + ax[1]) // 2)
                      * comb(l, (l + ax[2]) // 2))
    return Fraction(paths, 6 ** n)


def max_multinomial_parts(n: int) -> tuple[int, int, int]:
    """Parts (largest first) maximising n!/(i! j! l!): as equal as possible."""
    if n < 0:
        raise ValueError("n must be non-negative")
    q, r = divmod(n, 3)
    return tuple([q + 1] * r + [q] * (3 - r))


def max_multinomial(n: int) -> int:
    """C_n = max over i+j+l = n of n!/(i! j! l!)."""
    i, j, l = max_multinomial_parts(n)
    return factorial(n) // (factorial(i) * factorial(j) * factorial(l))


def z3_upper_bound(n: int) -> Fraction:
    """2^(-2n) C(2n, n) C_n 3^(-n), an upper bound on P(Y_2n = 0)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return Fraction(comb(2 * n, n) * max_multinomial(n), 4 ** n * 3 ** n)


def stirling_asymptotic(n: int) -> float:
    """3 sqrt(3) / (2 pi^(3/2) n^(3/2)), the large-n form of :func:`z3_upper_bound`."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 3 * sqrt(3) / (2 * pi ** 1.5 * n ** 1.5)


def shifted_bound_terms(n: int, x) -> tuple[Fraction, Fraction]:
    """Both sides of P(Y_n = x) <= 6^3 (P(Y_n = 0) + ... + P(Y_{n+3} = 0))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lhs = z3_point_probability_exact(n, x)
    rhs = 216 * sum((z3_origin_return_exact(n + j) for j in range(4)), Fraction(0))
    return lhs, rhs


def shifted_bound_check(n: int, x) -> bool:
    """Whether the shifted-point bound holds exactly (vacuously true off parity)."""
    lhs, rhs = shifted_bound_terms(n, x)
    return lhs <= rhs
