"""Series-based recurrence evidence for a walk."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .dp import origin_return_series
from .spec import WalkSpec

RECURRENT = "recurrent_evidence"
TRANSIENT = "transient_evidence"
DEGENERATE = "degenerate"
MIN_HORIZON = 10
MIN_FIT_POINTS = 5


@dataclass
class RecurrenceReport:
    verdict: str
    alpha: Optional[float]
    partial_sum: float
    partial_sum_exact: Optional[str]
    horizon: int
    fit_points: int
    unstable_fit: bool
    note: str = "finite-horizon evidence from the return-probability series, not a proof"

    def to_dict(self) -> dict:
        return asdict(self)


def fit_decay_exponent(series) -> tuple[Optional[float], int, float]:
    """Least-squares slope of -log P(Y_n = 0) against log n over the top half.

    Only the strictly positive terms with n in (horizon/2, horizon] enter the
    fit. Returns ``(alpha, points used, max abs residual)``.
    """
    h = len(series) - 1
    ns = [n for n in range(h // 2 + 1, h + 1) if series[n] > 0]
    if len(ns) < 2:
        return None, len(ns), float("nan")
    x = np.log(np.array(ns, dtype=float))
    y = np.log(np.array([float(series[n]) for n in ns]))
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + icpt))))
    return float(-slope), len(ns), resid


def classify_recurrence(w: WalkSpec, horizon: int, mode: str = "float") -> RecurrenceReport:
    """Recurrence verdict from the decay of P(Y_n = 0) up to ``horizon``.

    alpha <= 1 (series diverges) gives recurrent evidence, alpha > 1 transient
    evidence. A walk whose steps span fewer than ``dimension`` independent
    directions is reported degenerate without fitting.
    """
    if horizon < MIN_HORIZON:
        raise ValueError(f"horizon must be >= {MIN_HORIZON} for a decay fit")
    series = origin_return_series(w, horizon, mode)
    total = sum(series, Fraction(0) if mode == "rational" else 0.0)
    exact = str(total) if mode == "rational" else None
    if w.span_rank < w.dimension:
        return RecurrenceReport(DEGENERATE, None, float(total), exact, horizon, 0, False)
    alpha, used, resid = fit_decay_exponent(series)
    unstable = alpha is None or used < MIN_FIT_POINTS or resid > 0.05
    if alpha is None:
        verdict = TRANSIENT  # no mass returns in the fit window
    else:
        verdict = RECURRENT if alpha <= 1 else TRANSIENT
    return RecurrenceReport(verdict, alpha, float(total), exact, horizon, used, unstable)
