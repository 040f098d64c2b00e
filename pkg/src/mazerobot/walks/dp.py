"""Exact step distributions by repeated convolution on a dense cube.

Laws are kept as dense arrays over the cube ``[-r, r]^k`` with index
``x + r``. In rational mode the array holds integer path weights over the
common denominator ``D^n`` (``D`` the lcm of the step-weight denominators),
so every addition is exact big-integer arithmetic; float mode holds plain
probabilities. Only the part of the cube that can still influence the
requested output (the "light cone") is carried from step to step.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Iterator, Optional, Union

import numpy as np

from ..lattice import LatticePoint, l1_norm
from .spec import WalkSpec

MODES = ("rational", "float")
# dense cells allowed in one array (object cells cost ~30x a float cell)
MAX_FLOAT_CELLS = 60_000_000
MAX_RATIONAL_CELLS = 2_000_000

Number = Union[Fraction, float]


class GridTooLarge(MemoryError):
    """The dense grid for a computation would exceed the configured cell cap."""


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _zeros(k: int, r: int, mode: str) -> np.ndarray:
    cells = (2 * r + 1) ** k
    cap = MAX_RATIONAL_CELLS if mode == "rational" else MAX_FLOAT_CELLS
    if cells > cap:
        raise GridTooLarge(f"{cells} cells in Z^{k} cube of radius {r} exceed the {mode} cap {cap}")
    shape = (2 * r + 1,) * k
    if mode == "rational":
        return np.zeros(shape, dtype=object)
    return np.zeros(shape, dtype=np.float64)


def _weights(w: WalkSpec, mode: str) -> tuple[list, int]:
    if mode == "rational":
        return w.integer_weights(), w.denominator
    return [float(p) for p in w.weights], 1


def _push(old: np.ndarray, r_old: int, r_new: int, w: WalkSpec, weights, mode: str) -> np.ndarray:
    """One convolution step; mass landing outside the new cube is dropped."""
    k = w.dimension
    new = _zeros(k, r_new, mode)
    for v, c in zip(w.vectors, weights):
        src, dst = [], []
        for vi in v:
            shift = r_new - r_old + vi
            lo = max(0, -shift)
            hi = min(2 * r_old, 2 * r_new - shift)
            if lo > hi:
                break
            src.append(slice(lo, hi + 1))
            dst.append(slice(lo + shift, hi + shift + 1))
        else:
            new[tuple(dst)] += old[tuple(src)] * c
    return new


def _point_mass(k: int, mode: str) -> np.ndarray:
    a = _zeros(k, 0, mode)
    a[(0,) * k] = 1 if mode == "rational" else 1.0
    return a


@dataclass
class DistributionGrid:
    """Law of ``Y_n`` restricted to the L1 ball of radius ``radius``.

    ``values`` is a dense cube array of radius ``radius`` (cells outside the
    ball are zero). Rational grids store integers over ``denominator``; float
    grids store probabilities and have ``denominator == 1``.
    """

    dimension: int
    radius: int
    steps: int
    mode: str
    values: np.ndarray
    denominator: int = 1

    def _index(self, x) -> Optional[tuple]:
        x = tuple(int(c) for c in x)
        if len(x) != self.dimension:
            raise ValueError(f"point {x} is not in Z^{self.dimension}")
        if l1_norm(x) > self.radius:
            return None
        return tuple(c + self.radius for c in x)

    def _scale(self, raw) -> Number:
        if self.mode == "rational":
            return Fraction(int(raw), self.denominator)
        return float(raw)

    def mass(self, x) -> Number:
        """P(Y_n = x); points outside the ball raise ``KeyError``."""
        idx = self._index(x)
        if idx is None:
            raise KeyError(f"{tuple(x)} lies outside the stored ball of radius {self.radius}")
        return self._scale(self.values[idx])

    def items(self) -> Iterator[tuple[LatticePoint, Number]]:
        """Nonzero stored masses in lexicographic point order."""
        r = self.radius
        for idx in zip(*np.nonzero(self.values)):
            yield tuple(int(i) - r for i in idx), self._scale(self.values[idx])

    @property
    def stored_mass(self) -> Number:
        total = self.values.sum()
        return self._scale(total if self.values.size else 0)

    @property
    def truncation_mass(self) -> Number:
        """Probability that ``Y_n`` lies outside the stored ball."""
        return (1 if self.mode == "rational" else 1.0) - self.stored_mass

    def support(self) -> list[LatticePoint]:
        return [x for x, _ in self.items()]

    def __eq__(self, other):
        if not isinstance(other, DistributionGrid):
            return NotImplemented
        if (self.dimension, self.radius, self.steps, self.mode) != \
                (other.dimension, other.radius, other.steps, other.mode):
            return False
        return dict(self.items()) == dict(other.items())


def _restrict_to_ball(a: np.ndarray, r_cube: int, radius: int, k: int, mode: str) -> np.ndarray:
    """Cube array of radius ``radius`` keeping only cells with L1 norm <= radius."""
    out = _zeros(k, radius, mode)
    rr = min(r_cube, radius)
    src = tuple(slice(r_cube - rr, r_cube + rr + 1) for _ in range(k))
    dst = tuple(slice(radius - rr, radius + rr + 1) for _ in range(k))
    out[dst] = a[src]
    grids = np.meshgrid(*([np.arange(-radius, radius + 1)] * k), indexing="ij")
    outside = sum(np.abs(g) for g in grids) > radius if k else np.zeros((), bool)
    out[outside] = 0
    return out


def dp_step_distribution(w: WalkSpec, n: int, radius: int, mode: str = "rational") -> DistributionGrid:
    """Exact law of the ``n``-step walk on the L1 ball of radius ``radius``.

    Mass that ends outside the ball is reported as ``truncation_mass``.
    """
    _check_mode(mode)
    if n < 0 or radius < 0:
        raise ValueError("n and radius must be non-negative")
    k = w.dimension
    weights, d = _weights(w, mode)
    ri, r1 = w.reach_inf, w.reach
    a, r = _point_mass(k, mode), 0
    for i in range(1, n + 1):
        r_new = min(i * ri, radius + (n - i) * r1)
        a = _push(a, r, r_new, w, weights, mode)
        r = r_new
    vals = _restrict_to_ball(a, r, radius, k, mode)
    return DistributionGrid(k, radius, n, mode, vals, d ** n if mode == "rational" else 1)


def full_law(w: WalkSpec, n: int, mode: str = "rational") -> tuple[np.ndarray, int, int]:
    """Untruncated law of ``Y_n`` as ``(cube array, cube radius, denominator)``."""
    _check_mode(mode)
    weights, d = _weights(w, mode)
    a, r = _point_mass(w.dimension, mode), 0
    for i in range(1, n + 1):
        a = _push(a, r, i * w.reach_inf, w, weights, mode)
        r = i * w.reach_inf
    return a, r, d ** n if mode == "rational" else 1


def origin_return_series(w: WalkSpec, horizon: int, mode: str = "rational") -> list[Number]:
    """``[P(Y_0 = 0), ..., P(Y_horizon = 0)]`` from a single convolution pass."""
    _check_mode(mode)
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    k = w.dimension
    weights, d = _weights(w, mode)
    ri, r1 = w.reach_inf, w.reach
    a, r = _point_mass(k, mode), 0
    out: list[Number] = [Fraction(1) if mode == "rational" else 1.0]
    for i in range(1, horizon + 1):
        r_new = min(i * ri, (horizon - i) * r1)
        a = _push(a, r, r_new, w, weights, mode)
        r = r_new
        c = a[(r,) * k]
        out.append(Fraction(int(c), d ** i) if mode == "rational" else float(c))
    return out


def first_return_probabilities(w: WalkSpec, horizon: int, mode: str = "rational") -> list[Number]:
    """``f[t]`` = P(first return to the origin happens at step t), t = 0..horizon.

    Same convolution as :func:`origin_return_series`, but the origin absorbs:
    its mass is recorded and removed after every step (``f[0] = 0``).
    """
    _check_mode(mode)
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    k = w.dimension
    weights, d = _weights(w, mode)
    ri, r1 = w.reach_inf, w.reach
    a, r = _point_mass(k, mode), 0
    zero = Fraction(0) if mode == "rational" else 0.0
    out: list[Number] = [zero]
    for i in range(1, horizon + 1):
        r_new = min(i * ri, (horizon - i) * r1)
        a = _push(a, r, r_new, w, weights, mode)
        r = r_new
        c = a[(r,) * k]
        a[(r,) * k] = 0
        out.append(Fraction(int(c), d ** i) if mode == "rational" else float(c))
    return out


def first_return_cdf(w: WalkSpec, horizon: int, mode: str = "rational") -> list[Number]:
    """``F[t]`` = P(the walk has returned to the origin by step t)."""
    return list(accumulate(first_return_probabilities(w, horizon, mode)))
