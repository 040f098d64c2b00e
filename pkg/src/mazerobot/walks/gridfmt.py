"""Plain-text form of a :class:`DistributionGrid`.

::

    grid v1
    dimension 3
    steps 4
    radius 2
    mode rational
    denominator 1296
    # x1 x2 x3 value
    0 0 0 90
    ...

Rational rows hold the integer numerator over ``denominator``; float rows
hold the probability in ``repr`` form. Only nonzero cells are written.
"""
from __future__ import annotations

import io
from pathlib import Path
from typing import TextIO, Union

from .dp import MODES, DistributionGrid, _zeros


class GridFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def dump(grid: DistributionGrid, fh: TextIO) -> None:
    fh.write("grid v1\n")
    fh.write(f"dimension {grid.dimension}\nsteps {grid.steps}\nradius {grid.radius}\n")
    fh.write(f"mode {grid.mode}\ndenominator {grid.denominator}\n")
    fh.write("# " + " ".join(f"x{i + 1}" for i in range(grid.dimension)) + " value\n")
    r = grid.radius
    for x, _ in grid.items():
        raw = grid.values[tuple(c + r for c in x)]
        val = str(int(raw)) if grid.mode == "rational" else repr(float(raw))
        fh.write(" ".join(map(str, x)) + " " + val + "\n")


def dumps(grid: DistributionGrid) -> str:
    buf = io.StringIO()
    dump(grid, buf)
    return buf.getvalue()


def loads(text: str) -> DistributionGrid:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0][1] != "grid v1":
        raise GridFormatError("expected header 'grid v1'", lines[0][0] if lines else 1)
    header = {}
    for key in ("dimension", "steps", "radius", "mode", "denominator"):
        idx = len(header) + 1
        if idx >= len(lines):
            raise GridFormatError(f"missing '{key}' line", lines[-1][0])
        lineno, ln = lines[idx]
        parts = ln.split()
        if len(parts) != 2 or parts[0] != key:
            raise GridFormatError(f"expected '{key} <value>'", lineno)
        header[key] = parts[1]
    mode = header["mode"]
    if mode not in MODES:
        raise GridFormatError(f"unknown mode {mode!r}", lines[4][0])
    try:
        k, n, r, d = (int(header[x]) for x in ("dimension", "steps", "radius", "denominator"))
    except ValueError as e:
        raise GridFormatError(str(e), lines[1][0]) from None
    vals = _zeros(k, r, mode)
    for lineno, ln in lines[6:]:
        parts = ln.split()
        if len(parts) != k + 1:
            raise GridFormatError(f"expected {k} coordinates and a value", lineno)
        try:
            x = [int(c) for c in parts[:k]]
            v = int(parts[k]) if mode == "rational" else float(parts[k])
        except ValueError:
            raise GridFormatError("malformed number", lineno) from None
        if sum(abs(c) for c in x) > r:
            raise GridFormatError(f"point {tuple(x)} lies outside radius {r}", lineno)
        vals[tuple(c + r for c in x)] = v
    return DistributionGrid(k, r, n, mode, vals, d)


def write(grid: DistributionGrid, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(grid))


def read(path: Union[str, Path]) -> DistributionGrid:
    return loads(Path(path).read_text())
