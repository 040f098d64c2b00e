"""Goodness-of-fit primitives with pre-registered thresholds."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from math import sqrt
from typing import Hashable, Mapping

from scipy.stats import chi2

from .config import P_VALUE_THRESHOLD, SIGMA_THRESHOLD

MIN_EXPECTED = 5.0


@dataclass
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float
    bins: int
    pooled_bins: int
    samples: int
    degenerate: bool
    threshold: float = P_VALUE_THRESHOLD

    @property
    def passed(self) -> bool:
        return not self.degenerate and self.p_value > self.threshold

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def pool_bins(expected: Mapping[Hashable, float], observed: Mapping[Hashable, int]):
    """Merge low-expectation bins into one pooled bin.

    All bins with expected count below 5 (and any observed outcome missing
    from ``expected``) form a single pool; if the pool itself stays below 5
    it absorbs the smallest remaining bin. Bins keep a deterministic order.
    """
    keys = sorted(expected, key=repr)
    big = [x for x in keys if expected[x] >= MIN_EXPECTED]
    small = [x for x in keys if expected[x] < MIN_EXPECTED]
    extra_obs = sum(c for x, c in observed.items() if x not in expected)
    pool_e = sum(expected[x] for x in small)
    pool_o = sum(observed.get(x, 0) for x in small) + extra_obs
    pooled = len(small)
    if (small or extra_obs) and pool_e < MIN_EXPECTED and big:
        big.sort(key=lambda x: (expected[x], repr(x)))
        x = big.pop(0)
        pool_e += expected[x]
        pool_o += observed.get(x, 0)
        pooled += 1
    e = [expected[x] for x in big]
    o = [observed.get(x, 0) for x in big]
    if small or extra_obs:
        e.append(pool_e)
        o.append(pool_o)
    return e, o, pooled


def chi_square(observed: Mapping[Hashable, int], probabilities: Mapping[Hashable, float]) -> ChiSquareResult:
    """Pearson chi-square of observed counts against exact cell probabilities."""
    n = sum(observed.values())
    expected = {x: float(p) * n for x, p in probabilities.items() if p}
    e, o, pooled = pool_bins(expected, observed)
    if len(e) < 2 or n == 0:
        return ChiSquareResult(0.0, 0, 1.0, len(e), pooled, n, True)
    stat = sum((oi - ei) ** 2 / ei for oi, ei in zip(o, e))
    dof = len(e) - 1
    return ChiSquareResult(float(stat), dof, float(chi2.sf(stat, dof)), len(e), pooled, n, False)


def binomial_sigma(p: float, n: int) -> float:
    return sqrt(max(p * (1 - p), 0.0) / n) if n else float("inf")


def within_sigma(observed_freq: float, p: float, n: int, k: float = SIGMA_THRESHOLD) -> dict:
    """Two-sided check of an empirical frequency against a known probability."""
    s = binomial_sigma(p, n)
    z = (observed_freq - p) / s if s > 0 else (0.0 if observed_freq == p else float("inf"))
    return {"empirical": observed_freq, "expected": p, "sigma": s, "z": z,
            "threshold_sigma": k, "passed": abs(z) <= k}


def two_sample_within_sigma(k1: int, n1: int, k2: int, n2: int, k: float = SIGMA_THRESHOLD) -> dict:
    """Difference of two independent binomial frequencies, pooled variance."""
    p1, p2 = k1 / n1, k2 / n2
    pool = (k1 + k2) / (n1 + n2)
    s = sqrt(max(pool * (1 - pool), 0.0) * (1 / n1 + 1 / n2))
    z = (p1 - p2) / s if s > 0 else (0.0 if p1 == p2 else float("inf"))
    return {"freq_a": p1, "freq_b": p2, "sigma": s, "z": z, "threshold_sigma": k,
            "passed": abs(z) <= k}
