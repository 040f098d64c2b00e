"""Experiment reports: canonical JSON and a CSV projection."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from ..rng import GENERATOR_ID
from .config import SCHEMA_VERSION


def _plain(x: Any) -> Any:
    """JSON-safe copy: Fractions become strings, tuples lists, numpy scalars Python."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.generic):
        return _plain(x.item())
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    return x


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    results: dict
    # csv rows: a flat projection of the aggregate results
    rows: list = field(default_factory=list)
    wall_clock: Optional[float] = None

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "generator": GENERATOR_ID,
            "kind": self.kind,
            "config": self.config,
            "results": self.results,
        }
        if self.wall_clock is not None:
            d["wall_clock_seconds"] = self.wall_clock
        return _plain(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        rows = _plain(self.rows) or [_flatten(_plain(self.results))]
        cols: list[str] = []
        for r in rows:
            for c in r:
                if c not in cols:
                    cols.append(c)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({c: json.dumps(v) if isinstance(v, (list, dict)) else v for c, v in r.items()})
        return buf.getvalue()

    def render(self, fmt: str = "json") -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out
