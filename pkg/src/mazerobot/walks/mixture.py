"""Mixture walks via the binomial double sum."""
from __future__ import annotations

from math import comb

import numpy as np

from .dp import DistributionGrid, _check_mode, _restrict_to_ball, _zeros, full_law
from .spec import MixtureSpec


def _add_convolution(out: np.ndarray, r_out: int, a: np.ndarray, ra: int,
                     b: np.ndarray, rb: int, scale) -> None:
    """out += scale * (a * b), iterating over the nonzero cells of the sparser factor."""
    if np.count_nonzero(a) > np.count_nonzero(b):
        a, ra, b, rb = b, rb, a, ra
    side_b = 2 * rb + 1
    for idx in zip(*np.nonzero(a)):
        # cell x = idx - ra shifts b; b's corner lands at x - rb + r_out
        dst = tuple(slice(int(i) - ra - rb + r_out, int(i) - ra - rb + r_out + side_b) for i in idx)
        out[dst] += b * (a[idx] * scale)


def mixture_distribution(m: MixtureSpec, n: int, radius: int, mode: str = "rational") -> DistributionGrid:
    """Exact law of the mixture walk ``Z_n`` on the L1 ball of radius ``radius``.

    P(Z_n = z) = sum_i C(n, i) p^i q^(n-i) sum_{x+y=z} P(A_i = x) P(B_(n-i) = y),
    where A and B are the component walks. In rational mode every term is put
    over the common denominator pd^n DA^n DB^n with integer arithmetic.
    """
    _check_mode(mode)
    if n < 0 or radius < 0:
        raise ValueError("n and radius must be non-negative")
    a_spec, b_spec = m.component_a, m.component_b
    k = m.dimension
    laws_a = [full_law(a_spec, i, mode) for i in range(n + 1)]
    laws_b = [full_law(b_spec, i, mode) for i in range(n + 1)]
    r_out = n * max(a_spec.reach_inf, b_spec.reach_inf)
    out = _zeros(k, r_out, mode)
    p, q = m.prob_a, m.prob_b
    if mode == "rational":
        da, db, pd = a_spec.denominator, b_spec.denominator, p.denominator
        pn, qn = p.numerator, (q * pd).numerator if q else 0
        denom = pd ** n * da ** n * db ** n
        for i in range(n + 1):
            coef = comb(n, i) * pn ** i * qn ** (n - i)
            if coef == 0:
                continue
            scale = coef * da ** (n - i) * db ** i
            (xa, ra, _), (xb, rb, _) = laws_a[i], laws_b[n - i]
            _add_convolution(out, r_out, xa, ra, xb, rb, scale)
    else:
        denom = 1
        pf, qf = float(p), float(q)
        for i in range(n + 1):
            coef = comb(n, i) * pf ** i * qf ** (n - i)
            if coef == 0:
                continue
            (xa, ra, _), (xb, rb, _) = laws_a[i], laws_b[n - i]
            _add_convolution(out, r_out, xa, ra, xb, rb, coef)
    vals = _restrict_to_ball(out, r_out, radius, k, mode)
    return DistributionGrid(k, radius, n, mode, vals, denom)
