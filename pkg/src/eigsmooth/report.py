"""Solver reports and empirical convergence order."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

__all__ = ["SolveReport", "empirical_order"]


@dataclass
class SolveReport:
    """Outcome of a scalar optimization or root-finding run.

    ``iterations`` holds one dict per outer step (level or shift, bracket
    widths, ...).  ``certificates`` are ``(x, value)`` samples: for a
    maximization every value is at most ``optimum``, for a minimization at
    least ``optimum``.
    """

    optimum: float
    location: Any
    iterations: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    empirical_order: float = math.nan
    status: str = "converged"
    sense: str = "max"
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return _plain(asdict(self))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def empirical_order(history: Sequence[float], limit: Optional[float] = None,
                    window: int = 3, floor: float = 1e-15) -> float:
    """Median of ``log e_{k+1} / log e_k`` over the last ``window`` usable ratios.

    Errors are ``|x_k - limit|`` (``limit`` defaults to the last iterate,
    which is then dropped).  Only errors in ``(floor * max(1, |limit|), 1)``
    are used.  Returns NaN when no ratio survives.
    """
    xs = [float(x) for x in history]
    if len(xs) < 4:
        raise ValueError("need at least 4 iterates to estimate an order")
    if limit is None:
        limit, xs = xs[-1], xs[:-1]
    lo = floor * max(1.0, abs(limit))
    errs = [abs(x - limit) for x in xs]
    ratios = []
    for a, b in zip(errs, errs[1:]):
        if lo < a < 1 and lo < b < 1:
            ratios.append(math.log(b) / math.log(a))
    if not ratios:
        return math.nan
    return float(np.median(ratios[-window:]))
