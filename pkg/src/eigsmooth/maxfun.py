"""Pointwise maxima of finitely many univariate functions.

Members are indexed from 0.  Everything here is immutable and pure, so a
:class:`MaxFunction` can be evaluated from several threads at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CapabilityError, DomainError

__all__ = [
    "ScalarFunction",
    "MaxFunction",
    "ActiveSet",
    "QuadraticModel",
    "StationarityReport",
    "ExpansionReport",
    "eval_max",
    "active_set",
    "stationarity_check",
    "quadratic_model",
    "expansion_residual",
    "builtin_family",
    "dyadic_steps",
    "BUILTIN_FAMILIES",
]

#: One-sided derivatives closer than this are treated as a two-sided value.
SIDE_MATCH_TOL = 1e-9

DerivFn = Callable[[float, int, int], float]


def dyadic_steps(first: int = 1, last: int = 40) -> list[float]:
    """Step schedule ``2**-i`` for ``i = first..last``."""
    return [2.0**-i for i in range(first, last + 1)]


@dataclass(frozen=True)
class ScalarFunction:
    """A real function on a closed interval with derivatives up to order 3.

    ``impl(t, order, side)`` returns the derivative of the given order,
    taken from the left (``side=-1``), the right (``side=+1``) or as a
    plain two-sided value (``side=0``).  Smooth functions simply ignore
    ``side``.  Returning ``None`` marks an order as unavailable.
    """

    impl: DerivFn
    domain: tuple[float, float] = (-math.inf, math.inf)
    smoothness_class: int = 3
    breakpoints: tuple[float, ...] = ()
    name: str = ""

    @classmethod
    def from_derivatives(
        cls,
        derivs: Sequence[Callable[[float], float]],
        domain: tuple[float, float] = (-math.inf, math.inf),
        smoothness_class: Optional[int] = None,
        name: str = "",
    ) -> "ScalarFunction":
        """Build from ``[f, f', f'', ...]`` closed forms."""
        derivs = tuple(derivs)

        def impl(t, order, side):
            if order >= len(derivs):
                return None
            return float(derivs[order](t))

        q = len(derivs) - 1 if smoothness_class is None else smoothness_class
        return cls(impl, domain, q, (), name)

    @classmethod
    def piecewise(
        cls,
        breakpoint: float,
        left: "ScalarFunction",
        right: "ScalarFunction",
        smoothness_class: int = 1,
        name: str = "",
    ) -> "ScalarFunction":
        """Glue ``left`` (for t <= breakpoint) and ``right`` (t > breakpoint)."""
        lo = max(left.domain[0], -math.inf)
        hi = min(right.domain[1], math.inf)

        def impl(t, order, side):
            if t < breakpoint:
                return left.impl(t, order, 0)
            if t > breakpoint:
                return right.impl(t, order, 0)
            if side < 0:
                return left.impl(t, order, 0)
            if side > 0:
                return right.impl(t, order, 0)
            a = left.impl(t, order, 0)
            b = right.impl(t, order, 0)
            if a is None or b is None:
                return None
            if abs(a - b) <= SIDE_MATCH_TOL * max(1.0, abs(a), abs(b)):
                return b
            raise CapabilityError(
                f"derivative of order {order} at breakpoint {t} is one-sided "
                f"only (left {a}, right {b})"
            )

        bps = tuple(sorted(set(left.breakpoints + right.breakpoints + (breakpoint,))))
        return cls(impl, (lo, hi), smoothness_class, bps, name)

    def _check(self, t: float) -> None:
        lo, hi = self.domain
        if not (lo <= t <= hi):
            raise DomainError(f"t={t} outside domain [{lo}, {hi}]")

    def eval(self, t: float) -> float:
        return self.deriv(t, 0)

    def __call__(self, t: float) -> float:
        return self.deriv(t, 0)

    def deriv(self, t: float, order: int = 0, side: int = 0) -> float:
        """Derivative of ``order`` at ``t``.

        Raises :class:`CapabilityError` when the order is not available or
        the one-sided values disagree at a breakpoint and ``side == 0``.
        """
        if not 0 <= order <= 3:
            raise ValueError(f"order must be in 0..3, got {order}")
        self._check(t)
        val = self.impl(t, order, side)
        if val is None:
            raise CapabilityError(f"derivative of order {order} unavailable")
        return val


@dataclass(frozen=True)
class MaxFunction:
    """``t -> max_j f_j(t)`` over an ordered, nonempty list of members."""

    members: tuple[ScalarFunction, ...]
    domain: tuple[float, float] = (-math.inf, math.inf)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("MaxFunction needs at least one member")
        lo, hi = self.domain
        for f in self.members:
            if f.domain[0] > lo or f.domain[1] < hi:
                raise ValueError("member domain does not contain the shared domain")

    def __len__(self):
        return len(self.members)

    def values(self, t: float) -> np.ndarray:
        lo, hi = self.domain
        if not (lo <= t <= hi):
            raise DomainError(f"t={t} outside domain [{lo}, {hi}]")
        return np.array([f.eval(t) for f in self.members])

    def __call__(self, t: float) -> float:
        return float(self.values(t).max())


@dataclass(frozen=True)
class ActiveSet:
    x: float
    gamma: float
    indices: frozenset
    tolerance: float


@dataclass(frozen=True)
class QuadraticModel:
    """Local model ``gamma + curvature * eps**2`` around a maximizer.

    ``side`` is 0 for the two-sided model, or -1/+1 when only a one-sided
    model exists (members with one-sided second derivatives at ``center``).
    """

    center: float
    gamma: float
    curvature: float
    side: int = 0

    def __call__(self, eps):
        return self.gamma + self.curvature * np.square(eps)


@dataclass
class StationarityReport:
    steps: list
    fd_quotients: list  # (eps, forward quotient, backward quotient)
    converges_to_zero: bool
    threshold: float


@dataclass
class ExpansionReport:
    eps: list
    residuals: list
    fitted_order: float
    model: QuadraticModel = field(repr=False, default=None)


def eval_max(F: MaxFunction, t: float) -> tuple[float, frozenset]:
    """Value of the max and every index attaining it exactly."""
    vals = F.values(t)
    top = vals.max()
    return float(top), frozenset(int(j) for j in np.flatnonzero(vals == top))


def active_set(F: MaxFunction, x: float, tol: Optional[float] = None) -> ActiveSet:
    """Indices within ``tol`` of the max; default tol is 1e-10 * (1 + |gamma|)."""
    vals = F.values(x)
    gamma = float(vals.max())
    if tol is None:
        tol = 1e-10 * (1.0 + abs(gamma))
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    idx = frozenset(int(j) for j in np.flatnonzero(np.abs(vals - gamma) <= tol))
    return ActiveSet(x, gamma, idx, tol)


def stationarity_check(
    F: MaxFunction,
    x: float,
    steps: Optional[Sequence[float]] = None,
    threshold: float = 1e-6,
    window: int = 5,
) -> StationarityReport:
    """Forward and backward difference quotients of ``F`` at ``x``.

    ``converges_to_zero`` holds when every quotient over the ``window``
    smallest steps has magnitude at most ``threshold``, or when those
    magnitudes are nonincreasing and shrink at least fourfold across the
    window (quotients of order ``eps`` on a short schedule).
    """
    steps = dyadic_steps() if steps is None else list(steps)
    if not steps:
        raise ValueError("step schedule is empty")
    if any(b >= a for a, b in zip(steps, steps[1:])) or min(steps) <= 0:
        raise ValueError("step schedule must be positive and strictly decreasing")
    lo, hi = F.domain
    f0 = F(x)
    rows = []
    for eps in steps:
        fwd = (F(x + eps) - f0) / eps if x + eps <= hi else math.nan
        bwd = (F(x - eps) - f0) / -eps if x - eps >= lo else math.nan
        rows.append((eps, fwd, bwd))
    tail = rows[-window:]
    mags = [max(abs(q) for q in (fwd, bwd) if not math.isnan(q)) for _, fwd, bwd in tail]
    small = all(m <= threshold for m in mags)
    shrinking = (
        len(mags) >= 2
        and all(b <= a for a, b in zip(mags, mags[1:]))
        and mags[-1] <= 0.25 * mags[0]
    )
    ok = small or shrinking
    return StationarityReport(list(steps), rows, bool(ok), threshold)


def quadratic_model(F: MaxFunction, x: float, side: int = 0, tol: Optional[float] = None) -> QuadraticModel:
    """Curvature ``M = max_{active j} f_j''(x) / 2`` at a maximizer.

    With ``side=0`` every active member must have a two-sided second
    derivative; pass ``side=-1`` or ``+1`` for the one-sided model.
    """
    act = active_set(F, x, tol)
    d2 = [F.members[j].deriv(x, 2, side) for j in sorted(act.indices)]
    return QuadraticModel(x, act.gamma, 0.5 * max(d2), side)


def _loglog_slope(eps, res) -> float:
    pts = [(math.log(abs(e)), math.log(r)) for e, r in zip(eps, res) if r > 0 and e != 0]
    if not pts:
        return math.inf
    if len(pts) == 1:
        return math.nan
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def expansion_residual(
    F: MaxFunction,
    x: float,
    eps_grid: Sequence[float],
    model: Optional[QuadraticModel] = None,
) -> ExpansionReport:
    """Residuals ``|F(x+e) - gamma - M e^2|`` and their log-log slope.

    Zero offsets are skipped.  When every residual vanishes the fitted
    order is ``inf``.  A one-sided ``model`` should only be paired with
    offsets on its side.
    """
    if model is None:
        model = quadratic_model(F, x)
    eps = [float(e) for e in eps_grid if e != 0]
    res = [abs(F(x + e) - model(e)) for e in eps]
    return ExpansionReport(eps, res, _loglog_slope(eps, res), model)


# -- built-in families -------------------------------------------------------


def _poly(coeffs):
    """ScalarFunction for sum coeffs[i] t^i, derivatives exact."""
    p = np.polynomial.Polynomial(coeffs)
    ders = [p, p.deriv(1), p.deriv(2), p.deriv(3)]
    return ScalarFunction.from_derivatives(ders, smoothness_class=3)


def _two_piece_c1() -> MaxFunction:
    f1 = ScalarFunction.piecewise(0.0, _poly([0, 0, -1]), _poly([0, 0, -3]), 1, "f1")
    f2 = _poly([0, 0, -2])
    return MaxFunction((f1, f2), name="two_piece_c1")


def _sin_member(a: float) -> ScalarFunction:
    """``t^8 (sin(a/t) - 1)`` with value and first three derivatives 0 at 0."""

    def v(t, i):
        s, c = math.sin(a / t), math.cos(a / t)
        if i == 0:
            return s - 1.0
        if i == 1:
            return -a * c / t**2
        if i == 2:
            return 2 * a * c / t**3 - a * a * s / t**4
        return -6 * a * c / t**4 + 6 * a * a * s / t**5 + a**3 * c / t**6

    def u(t, m):
        return math.perm(8, m) * t ** (8 - m)

    def impl(t, order, side):
        if abs(t) < 1e-40:  # every term is O(t^2); avoids overflow of a/t
            return 0.0
        return sum(math.comb(order, i) * u(t, order - i) * v(t, i) for i in range(order + 1))

    return ScalarFunction(impl, (-math.inf, math.inf), 3, (), f"t^8(sin({a}/t)-1)")


def _remark_sin_pair() -> MaxFunction:
    return MaxFunction((_sin_member(1.0), _sin_member(0.5)), name="remark_sin_pair")


def _neg_abs() -> MaxFunction:
    f = ScalarFunction.piecewise(0.0, _poly([0, 1]), _poly([0, -1]), 0, "-|t|")
    return MaxFunction((f,), name="neg_abs")


BUILTIN_FAMILIES = {
    "two_piece_c1": _two_piece_c1,
    "remark_sin_pair": _remark_sin_pair,
    "neg_abs": _neg_abs,
}


def builtin_family(name: str) -> MaxFunction:
    try:
        return BUILTIN_FAMILIES[name]()
    except KeyError:
        raise ValueError(
            f"unknown family {name!r}; choose from {sorted(BUILTIN_FAMILIES)}"
        ) from None
