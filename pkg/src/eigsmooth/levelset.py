"""Level-set global maximization of a univariate function.

At level ``gamma_k`` the superlevel set ``{x : f(x) > gamma_k}`` is
located as a union of intervals, and ``gamma_{k+1}`` is the best value at
their midpoints.  Near a C^2 maximizer the midpoint of the top interval
is off by O(gamma* - gamma_k), so levels converge quadratically.

Crossings are found generically: sample, isolate sign changes of
``f - gamma``, and bisect (Brent) to the crossing.  Sampled local maxima
that sit below the level get a local refinement so thin peaks between
samples are not lost.  Later levels only search inside the previous
intervals since superlevel sets are nested.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .eigfamily import local_refine
from .report import SolveReport, empirical_order

__all__ = ["levelset_maximize", "superlevel_intervals"]


def _crossing(f, gamma, a, b, fa, fb, xtol):
    """Point in [a, b] where f crosses gamma; fa - gamma and fb - gamma differ in sign."""
    if fa == gamma:
        return a
    if fb == gamma:
        return b
    return brentq(lambda t: f(t) - gamma, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)


def superlevel_intervals(f: Callable[[float], float], lo: float, hi: float, gamma: float,
                         samples: int = 32, xtol: float = 1e-14,
                         seeds: Sequence[float] = ()) -> list[tuple[float, float]]:
    """Intervals of ``[lo, hi]`` on which ``f > gamma``, found from ``samples``
    equispaced points (plus ``seeds``)."""
    xs = np.unique(np.concatenate([np.linspace(lo, hi, samples), np.asarray(seeds, float)]))
    xs = xs[(xs >= lo) & (xs <= hi)]
    vals = np.array([f(x) for x in xs])
    above = vals > gamma
    scale = xtol * max(1.0, abs(lo), abs(hi))

    # thin peaks hidden between samples
    extra = []
    for i in range(1, len(xs) - 1):
        if not above[i] and vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1]:
            rep = local_refine(f, (xs[i - 1], xs[i + 1]), tol=scale)
            if rep.optimum > gamma:
                extra.append((rep.location, rep.optimum, xs[i - 1], xs[i + 1]))

    out = []
    n = len(xs)
    i = 0
    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and above[j + 1]:
            j += 1
        left = xs[0] if i == 0 else _crossing(f, gamma, xs[i - 1], xs[i], vals[i - 1], vals[i], scale)
        right = xs[-1] if j == n - 1 else _crossing(f, gamma, xs[j], xs[j + 1], vals[j], vals[j + 1], scale)
        out.append((float(left), float(right)))
        i = j + 1
    for xp, vp, a, b in extra:
        if any(l <= xp <= r for l, r in out):
            continue
        left = _crossing(f, gamma, a, xp, f(a), vp, scale)
        right = _crossing(f, gamma, xp, b, vp, f(b), scale)
        out.append((float(left), float(right)))
    out.sort()
    return out


def levelset_maximize(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    tol: float = 1e-8,
    start_points: Sequence[float] = (),
    seeds: Sequence[float] = (),
    init_samples: int = 400,
    sub_samples: int = 16,
    periodic: bool = False,
    max_iter: int = 60,
    to_user: Optional[Callable[[float], float]] = None,
) -> SolveReport:
    """Global maximum of ``f`` on ``[lo, hi]`` by the midpoint level-set iteration.

    ``start_points`` set the initial level (the endpoints are always
    included); ``seeds`` are extra sample locations for the first level
    set.  With ``periodic`` the function must satisfy
    ``f(x + (hi - lo)) = f(x)`` and superlevel sets may wrap around.
    ``to_user`` maps internal coordinates to reported locations.
    """
    to_user = to_user or (lambda x: x)
    period = hi - lo
    starts = [lo, hi, *start_points]
    best_x, gamma = max(((x, f(x)) for x in starts), key=lambda p: p[1])
    certificates = [(to_user(x), f(x)) for x in starts]
    history = [{"level": gamma, "intervals": [], "widths": []}]
    status = "converged"

    intervals = superlevel_intervals(f, lo, hi, gamma, init_samples, seeds=seeds)
    if periodic and len(intervals) > 1 and intervals[0][0] == lo and intervals[-1][1] == hi:
        first = intervals.pop(0)
        last = intervals.pop()
        intervals.append((last[0], first[1] + period))

    for _ in range(max_iter):
        if not intervals:
            break
        history[-1]["intervals"] = [[to_user(a), to_user(b)] for a, b in intervals]
        history[-1]["widths"] = [b - a for a, b in intervals]
        mids = [0.5 * (a + b) for a, b in intervals]
        mvals = [f(m) for m in mids]
        certificates.extend((to_user(m), v) for m, v in zip(mids, mvals))
        k = int(np.argmax(mvals))
        new_gamma = mvals[k]
        if new_gamma <= gamma:
            # midpoints did not rise (rounding floor); keep the current level
            break
        improvement = new_gamma - gamma
        gamma, best_x = new_gamma, mids[k]
        history.append({"level": gamma, "intervals": [], "widths": []})
        if improvement <= 0.5 * tol:
            break
        nxt = []
        for a, b in intervals:
            nxt.extend(superlevel_intervals(f, a, b, gamma, sub_samples))
        intervals = nxt
    else:
        status = "max_iter"

    # polish the best candidate with the C^2 local model
    width = max((b - a for a, b in intervals), default=0.0)
    half = max(width, 1e-6 * max(1.0, abs(best_x)))
    a = best_x - half
    b = best_x + half
    if not periodic:
        a, b = max(a, lo), min(b, hi)
    optimum, location = gamma, best_x
    if b > a:
        pol = local_refine(f, (a, b), tol=1e-13 * max(1.0, abs(best_x)))
        certificates.append((to_user(pol.location), pol.optimum))
        if pol.optimum > optimum:
            optimum, location = pol.optimum, pol.location
    if periodic:
        location = lo + (location - lo) % period
    levels = [h["level"] for h in history]
    try:
        order = empirical_order(levels + [optimum], limit=optimum)
    except ValueError:
        order = math.nan
    return SolveReport(
        optimum=float(optimum),
        location=float(to_user(location)),
        iterations=history,
        certificates=[(float(x), float(v)) for x, v in certificates],
        empirical_order=order,
        status=status,
        sense="max",
        extra={"levels": levels},
    )
