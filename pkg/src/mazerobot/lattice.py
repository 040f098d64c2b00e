"""Integer-lattice geometry on Z^k.

Points are plain tuples of ints. Unit moves are encoded as signed direction
codes: ``0`` is the zero move, ``+i`` is ``+e_i`` and ``-i`` is ``-e_i``
(axes are 1-based, matching the usual ``e_1 .. e_k`` naming).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

LatticePoint = tuple[int, ...]


class DimensionError(ValueError):
    pass


def origin(k: int) -> LatticePoint:
    if k < 1:
        raise DimensionError(f"dimension must be >= 1, got {k}")
    return (0,) * k


def _check_dims(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise DimensionError(f"dimension mismatch: {len(a)} vs {len(b)}")


def add(a: Sequence[int], b: Sequence[int]) -> LatticePoint:
    _check_dims(a, b)
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> LatticePoint:
    _check_dims(a, b)
    return tuple(x - y for x, y in zip(a, b))


def neg(a: Sequence[int]) -> LatticePoint:
    return tuple(-x for x in a)


def l1_norm(a: Sequence[int]) -> int:
    return sum(abs(x) for x in a)


def l1_distance(a: Sequence[int], b: Sequence[int]) -> int:
    """City-block distance between two points of the same dimension."""
    _check_dims(a, b)
    return sum(abs(x - y) for x, y in zip(a, b))


# -- moves -------------------------------------------------------------------

def unit(k: int, code: int) -> LatticePoint:
    """Vector of the move ``code`` in Z^k (``0`` gives the zero vector)."""
    if abs(code) > k:
        raise DimensionError(f"move {format_move(code)} does not exist in Z^{k}")
    v = [0] * k
    if code:
        v[abs(code) - 1] = 1 if code > 0 else -1
    return tuple(v)


def move_code(v: Sequence[int]) -> int:
    """Inverse of :func:`unit`; rejects anything that is not 0 or +-e_i."""
    code = 0
    for i, x in enumerate(v):
        if x == 0:
            continue
        if code or x not in (1, -1):
            raise ValueError(f"{tuple(v)} is not a unit move")
        code = (i + 1) * x
    return code


def format_move(code: int) -> str:
    if code == 0:
        return "0"
    return f"{'+' if code > 0 else '-'}e{abs(code)}"


def parse_move(text: str) -> int:
    text = text.strip()
    if text == "0":
        return 0
    if len(text) >= 3 and text[0] in "+-" and text[1] == "e" and text[2:].isdigit():
        axis = int(text[2:])
        if axis >= 1:
            return axis if text[0] == "+" else -axis
    raise ValueError(f"bad move {text!r}; expected 0, +eI or -eI")


def plane_moves(*axes: int) -> tuple[int, ...]:
    """The move alphabet (+e_a, -e_a, +e_b, -e_b, ...) for the given axes."""
    out = []
    for a in axes:
        out += [a, -a]
    return tuple(out)


# -- affine subspaces ------------------------------------------------------------

def hermite_rows(vectors: Iterable[Sequence[int]], k: int) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Integer row echelon form of ``vectors`` (unimodular row operations only).

    Returns the nonzero echelon rows and their pivot columns. Every pivot is
    positive and entries above a pivot are reduced into ``[0, pivot)``, so the
    result is the Hermite normal form of the integer row lattice.
    """
    rows = [list(v) for v in vectors]
    for v in rows:
        if len(v) != k:
            raise DimensionError(f"vector {tuple(v)} is not in Z^{k}")
    pivots: list[int] = []
    top = 0
    for col in range(k):
        if top == len(rows):
            break
        while True:
            live = [i for i in range(top, len(rows)) if rows[i][col] != 0]
            if not live:
                break
            best = min(live, key=lambda i: abs(rows[i][col]))
            rows[top], rows[best] = rows[best], rows[top]
            p = rows[top][col]
            done = True
            for i in range(top + 1, len(rows)):
                q = rows[i][col] // p
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[top])]
                if rows[i][col] != 0:
                    done = False
            if done:
                break
        if rows[top][col] == 0:
            continue
        if rows[top][col] < 0:
            rows[top] = [-a for a in rows[top]]
        p = rows[top][col]
        for i in range(top):
            q = rows[i][col] // p
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[top])]
        pivots.append(col)
        top += 1
    echelon = tuple(tuple(r) for r in rows[:top])
    return echelon, tuple(pivots)


def integer_rank(vectors: Sequence[Sequence[int]], k: int) -> int:
    return len(hermite_rows(vectors, k)[0])


@dataclass(frozen=True)
class AffineSubspace:
    """The lattice set ``base + Z*b_1 + ... + Z*b_r``.

    Flag sets are affine subspaces: a single flag is the 0-dimensional
    subspace at that cell, and the Z^8 flag plane is
    ``AffineSubspace.coordinate((0,)*8, axes=(7, 8))``.
    """

    base: LatticePoint
    basis: tuple[LatticePoint, ...] = ()
    _hnf: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    _pivots: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        base = tuple(int(x) for x in self.base)
        basis = tuple(tuple(int(x) for x in v) for v in self.basis)
        k = len(base)
        if k < 1:
            raise DimensionError("an affine subspace needs dimension >= 1")
        hnf, piv = hermite_rows(basis, k)
        if len(hnf) != len(basis):
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_hnf", hnf)
        object.__setattr__(self, "_pivots", piv)

    @classmethod
    def point(cls, p: Sequence[int]) -> "AffineSubspace":
        return cls(tuple(p), ())

    @classmethod
    def coordinate(cls, base: Sequence[int], axes: Iterable[int]) -> "AffineSubspace":
        """Subspace through ``base`` spanned by the 1-based coordinate axes."""
        k = len(base)
        return cls(tuple(base), tuple(unit(k, a) for a in axes))

    @property
    def dimension(self) -> int:
        return len(self.base)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def hermite(self) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
        return self._hnf, self._pivots

    def contains(self, x: Sequence[int]) -> bool:
        v = list(sub(x, self.base))
        for row, col in zip(self._hnf, self._pivots):
            q, r = divmod(v[col], row[col])
            if r:
                return False
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return not any(v)

    __contains__ = contains


def subspace_contains(s: AffineSubspace, x: Sequence[int]) -> bool:
    return s.contains(x)


def l1_ball_size(k: int, radius: int) -> int:
    """Number of points of Z^k within L1 distance ``radius``; i counts the nonzero coordinates."""
    if radius < 0:
        return 0
    return sum(comb(k, i) * 2 ** i * comb(radius, i) for i in range(k + 1))


def l1_ball(k: int, radius: int) -> list[LatticePoint]:
    """All points of Z^k within L1 distance ``radius`` of the origin, sorted."""
    if radius < 0:
        return []
    pts: list[LatticePoint] = [()]
    for _ in range(k):
        nxt = []
        for p in pts:
            budget = radius - l1_norm(p)
            for x in range(-budget, budget + 1):
                nxt.append(p + (x,))
        pts = nxt
    return sorted(pts)
