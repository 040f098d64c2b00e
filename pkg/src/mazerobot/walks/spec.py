"""Finite-support walks with exact rational step weights."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable

from ..lattice import DimensionError, LatticePoint, integer_rank, l1_norm, unit


@dataclass(frozen=True)
class WalkSpec:
    """Step law of a walk: ``steps`` pairs each vector with its probability.

    Duplicate vectors are merged on construction and the vectors are kept in
    sorted order, so two specs describing the same law compare equal.
    """

    dimension: int
    steps: tuple[tuple[LatticePoint, Fraction], ...]

    def __post_init__(self):
        merged: dict[LatticePoint, Fraction] = {}
        for v, p in self.steps:
            v = tuple(int(c) for c in v)
            if len(v) != self.dimension:
                raise DimensionError(f"step {v} is not a vector of Z^{self.dimension}")
            p = Fraction(p)
            if p <= 0:
                raise ValueError(f"step {v} has non-positive weight {p}")
            merged[v] = merged.get(v, Fraction(0)) + p
        total = sum(merged.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"step weights sum to {total}, not 1")
        object.__setattr__(self, "steps", tuple(sorted(merged.items())))

    @classmethod
    def from_weights(cls, dimension: int, weights: Iterable[tuple]) -> "WalkSpec":
        return cls(dimension, tuple((tuple(v), Fraction(p)) for v, p in weights))

    @classmethod
    def simple(cls, k: int) -> "WalkSpec":
        """Uniform over the 2k unit moves."""
        p = Fraction(1, 2 * k)
        return cls(k, tuple((unit(k, s * i), p) for i in range(1, k + 1) for s in (1, -1)))

    @classmethod
    def stay(cls, k: int) -> "WalkSpec":
        """The walk that never moves."""
        return cls(k, (((0,) * k, Fraction(1)),))

    @classmethod
    def lazy(cls, k: int, hold: Fraction = Fraction(1, 2)) -> "WalkSpec":
        """Simple walk that stays put with probability ``hold``."""
        hold = Fraction(hold)
        if not 0 < hold < 1:
            raise ValueError("hold probability must lie strictly between 0 and 1")
        p = (1 - hold) / (2 * k)
        moves = [(unit(k, s * i), p) for i in range(1, k + 1) for s in (1, -1)]
        return cls(k, tuple(moves + [((0,) * k, hold)]))

    @property
    def vectors(self) -> list[LatticePoint]:
        return [v for v, _ in self.steps]

    @property
    def weights(self) -> list[Fraction]:
        return [p for _, p in self.steps]

    @property
    def denominator(self) -> int:
        return lcm(*(p.denominator for p in self.weights))

    def integer_weights(self) -> list[int]:
        d = self.denominator
        return [int(p * d) for p in self.weights]

    @property
    def reach(self) -> int:
        """Largest L1 length of a step."""
        return max(l1_norm(v) for v in self.vectors)

    @property
    def reach_inf(self) -> int:
        """Largest coordinate change of a step."""
        return max((abs(c) for v in self.vectors for c in v), default=0)

    @property
    def span_rank(self) -> int:
        return integer_rank(self.vectors, self.dimension)


@dataclass(frozen=True)
class MixtureSpec:
    """Each step is drawn from ``component_a`` with probability ``prob_a``, else from ``component_b``."""

    component_a: WalkSpec
    component_b: WalkSpec
    prob_a: Fraction

    def __post_init__(self):
        p = Fraction(self.prob_a)
        object.__setattr__(self, "prob_a", p)
        if self.component_a.dimension != self.component_b.dimension:
            raise DimensionError("mixture components live in different dimensions")
        if not 0 < p <= 1:
            raise ValueError("prob_a must lie in (0, 1]")

    @property
    def prob_b(self) -> Fraction:
        return 1 - self.prob_a

    @property
    def dimension(self) -> int:
        return self.component_a.dimension


def mixed_walk(m: MixtureSpec) -> WalkSpec:
    """One-step law ``p*a + q*b`` of a mixture."""
    ws = [(v, m.prob_a * p) for v, p in m.component_a.steps]
    if m.prob_b:
        ws += [(v, m.prob_b * p) for v, p in m.component_b.steps]
    return WalkSpec(m.dimension, tuple(ws))
