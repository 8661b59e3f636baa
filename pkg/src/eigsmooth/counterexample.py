"""Piecewise degree-9 construction of a C^3 function whose max with its
mirror image has an isolated maximizer at 0 but kinks at every t_k.

Piece ``k`` lives on ``[l_{k+1}, l_k]`` with ``l_k = 2**-k``.  It touches
``-t^2`` to third order at both ends and crosses it at the midpoint
``t_k`` with slope ``s_k`` times that of ``-t^2``.  For ``t <= 0`` the
function is ``-t^2``.

Coefficients are kept as exact rationals.  Floating-point evaluation
works on the deviation ``p_k(t) + t^2`` in the rescaled variable
``zeta = t / l_{k+1}`` in ``[1, 2]``, which avoids the huge monomial
coefficients of large ``k``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from .errors import NumericalError, ResolutionError
from .maxfun import MaxFunction, ScalarFunction

__all__ = [
    "Z_TABLE",
    "SlopeSequence",
    "PkPolynomial",
    "CounterexampleFunction",
    "breakpoint",
    "midpoint",
    "solve_pk",
    "closed_form_coeffs",
    "kink_gap",
    "kink_gap_fd",
    "verify_c3",
    "isolation_bound",
    "verify_isolated_max",
    "generalize_q",
    "emit_plot_data",
    "FIGURES",
]

Number = Union[int, float, Fraction]

#: Integer constants of the closed-form coefficients, keyed by power of t.
Z_TABLE = {
    9: -98304,
    8: 663552,
    7: -1966080,
    6: 3354624,
    5: -3631104,
    4: 2585088,
    3: -1210368,
    2: 359424,
    1: -61440,
    0: 4608,
}

GRID_POINTS = 1000


def breakpoint(k: int) -> Fraction:
    """``l_k = 2**-k`` as an exact rational."""
    return Fraction(1, 2**k)


def midpoint(k: int) -> Fraction:
    """``t_k = (l_{k+1} + l_k) / 2 = 3 * 2**-(k+2)``."""
    return Fraction(3, 2 ** (k + 2))


@dataclass(frozen=True)
class SlopeSequence:
    """Midpoint slope multipliers ``s_k``.

    ``appendix_a``: ``1 + 2**-2k``; ``appendix_b``: ``1 + 2**-k``;
    ``constant_two``: ``2``; ``general_q``: ``1 + 2**-(k+1)`` for q = 1
    and ``1 + 2**-((q-1)k)`` for q >= 2.  ``rule`` overrides all of these.
    """

    kind: str = "appendix_a"
    q: int = 3
    rule: Optional[Callable[[int], Number]] = field(default=None, compare=False)

    KINDS = ("appendix_a", "appendix_b", "constant_two", "general_q", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown slope kind {self.kind!r}")
        if self.kind == "custom" and self.rule is None:
            raise ValueError("custom slopes need a rule")
        if self.q < 1:
            raise ValueError("q must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "SlopeSequence":
        """Parse the CLI spelling ``a``, ``b``, ``two`` or ``q=<n>``."""
        text = text.strip()
        aliases = {"a": "appendix_a", "b": "appendix_b", "two": "constant_two"}
        if text in aliases:
            return cls(aliases[text])
        if text in cls.KINDS and text not in ("general_q", "custom"):
            return cls(text)
        if text.startswith("q="):
            return cls("general_q", q=int(text[2:]))
        raise ValueError(f"cannot parse slope sequence {text!r}")

    def __call__(self, k: int) -> Fraction:
        if self.rule is not None:
            return Fraction(self.rule(k))
        if self.kind == "appendix_a":
            return 1 + Fraction(1, 4**k)
        if self.kind == "appendix_b":
            return 1 + Fraction(1, 2**k)
        if self.kind == "constant_two":
            return Fraction(2)
        if self.q == 1:
            return 1 + Fraction(1, 2 ** (k + 1))
        return 1 + Fraction(1, 2 ** ((self.q - 1) * k))

    @property
    def degree_q(self) -> int:
        """Contact order at the breakpoints (3 except for general_q)."""
        return self.q if self.kind in ("general_q", "custom") else 3

    @property
    def label(self) -> str:
        if self.kind == "general_q":
            return f"q={self.q}"
        return f"custom(q={self.q})" if self.kind == "custom" else self.kind


@dataclass(frozen=True)
class PkPolynomial:
    """Exact monomial coefficients of one piece, ``p_k(t) = sum c_j t^j``."""

    k: int
    coeffs: tuple
    provenance: str
    q: int = 3
    slope: Fraction = Fraction(2)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval_exact(self, t: Fraction, order: int = 0) -> Fraction:
        acc = Fraction(0)
        for j in range(self.degree, order - 1, -1):
            acc = acc * t + self.coeffs[j] * math.perm(j, order)
        return acc

    def constraint_residuals(self, coeffs: Optional[Sequence[Fraction]] = None) -> list[Fraction]:
        """The 2q+4 defining residuals, exactly, for ``coeffs`` (default: own)."""
        poly = self if coeffs is None else PkPolynomial(self.k, tuple(coeffs), "check", self.q, self.slope)
        out = []
        for node in (breakpoint(self.k + 1), breakpoint(self.k)):
            for d in range(self.q + 1):
                out.append(poly.eval_exact(node, d) - _neg_sq_exact(node, d))
        tk = midpoint(self.k)
        out.append(poly.eval_exact(tk, 0) + tk * tk)
        out.append(poly.eval_exact(tk, 1) - self.slope * (-2 * tk))
        return out

    def rounded_residuals(self) -> list[float]:
        """Residuals after rounding every coefficient to double precision."""
        rounded = [Fraction(float(c)) for c in self.coeffs]
        return [abs(float(r)) for r in self.constraint_residuals(rounded)]

    def deviation_scaled(self) -> np.ndarray:
        """Float coefficients of ``(p_k + t^2)(l_{k+1} * zeta)`` in powers of zeta."""
        scale = breakpoint(self.k + 1)
        dev = list(self.coeffs)
        dev[2] += 1
        return np.array([float(c * scale**j) for j, c in enumerate(dev)])


def _neg_sq_exact(t: Fraction, order: int) -> Fraction:
    return (-t * t, -2 * t, Fraction(-2))[order] if order < 3 else Fraction(0)


def _neg_sq(t, order: int):
    if order == 0:
        return -t * t
    if order == 1:
        return -2.0 * t
    if order == 2:
        return np.full_like(np.asarray(t, dtype=float), -2.0)[()]
    return np.zeros_like(np.asarray(t, dtype=float))[()]


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals."""
    n = len(b)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise NumericalError("singular interpolation system")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        s = m[r][n] - sum(m[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / m[r][r]
    return x


def _vandermonde_row(t: Fraction, order: int, ncoef: int) -> list[Fraction]:
    return [
        Fraction(math.perm(j, order)) * t ** (j - order) if j >= order else Fraction(0)
        for j in range(ncoef)
    ]


def solve_pk(k: int, s_k: Number, q: int = 3) -> PkPolynomial:
    """Solve the generalized Vandermonde system for piece ``k`` exactly.

    Degree is ``2q + 3``: orders ``0..q`` of ``-t^2`` are matched at both
    breakpoints, the value at ``t_k`` is matched, and the slope at ``t_k``
    is ``s_k`` times ``-2 t_k``.  Float ``s_k`` is converted exactly.
    """
    if k < 0 or q < 1:
        raise ValueError("need k >= 0 and q >= 1")
    s = Fraction(s_k)
    if s <= 0:
        raise ValueError("s_k must be positive")
    n = 2 * q + 4
    rows, rhs = [], []
    for node in (breakpoint(k + 1), breakpoint(k)):
        for d in range(q + 1):
            rows.append(_vandermonde_row(node, d, n))
            rhs.append(_neg_sq_exact(node, d))
    tk = midpoint(k)
    rows.append(_vandermonde_row(tk, 0, n))
    rhs.append(-tk * tk)
    rows.append(_vandermonde_row(tk, 1, n))
    rhs.append(s * (-2 * tk))
    return PkPolynomial(k, tuple(_solve_exact(rows, rhs)), "vandermonde_solve", q, s)


def closed_form_coeffs(k: int, variant: str = "appendix_a") -> PkPolynomial:
    """Coefficients from the integer table: ``z_j 2**((j-e)k)`` minus 1 at j = 2,
    with ``e = 4`` for ``appendix_a`` and ``e = 3`` for ``appendix_b``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    shift = {"appendix_a": 4, "appendix_b": 3}.get(variant)
    if shift is None:
        raise ValueError(f"closed form only exists for appendix_a/appendix_b, not {variant!r}")
    coeffs = []
    for j in range(10):
        c = Z_TABLE[j] * Fraction(2) ** ((j - shift) * k)
        coeffs.append(c - 1 if j == 2 else c)
    slope = SlopeSequence(variant)(k)
    return PkPolynomial(k, tuple(coeffs), "closed_form", 3, slope)


class CounterexampleFunction:
    """``f_1`` on ``[-1, 1]`` with pieces ``k = 0..k_max`` built eagerly.

    Breakpoints belong to the piece on their right, so ``f_1(l_k)`` is
    taken from piece ``k - 1`` (piece 0 for ``t = 1``).
    """

    def __init__(self, slopes: SlopeSequence | str = "appendix_a", k_max: int = 40,
                 use_closed_form: bool = True):
        if isinstance(slopes, str):
            slopes = SlopeSequence.parse(slopes)
        if k_max < 0:
            raise ValueError("k_max must be >= 0")
        self.slopes = slopes
        self.k_max = k_max
        self.q = slopes.degree_q
        closed = use_closed_form and slopes.kind in ("appendix_a", "appendix_b") and slopes.rule is None
        if closed:
            self.pieces = tuple(closed_form_coeffs(k, slopes.kind) for k in range(k_max + 1))
        else:
            self.pieces = tuple(solve_pk(k, slopes(k), self.q) for k in range(k_max + 1))
        self._scaled = tuple(p.deviation_scaled() for p in self.pieces)
        self.floor = 2.0 ** -(k_max + 1)

    def __repr__(self):
        return f"CounterexampleFunction({self.slopes.label!r}, k_max={self.k_max})"

    # -- piece lookup ---------------------------------------------------------

    def piece_index(self, t: float) -> int:
        """Index k with ``l_{k+1} <= t < l_k`` (k = 0 for t = 1)."""
        if not 0 < t <= 1:
            raise ValueError("piece index only defined on (0, 1]")
        if t < self.floor:
            raise ResolutionError(
                f"t={t} lies below l_{self.k_max + 1}; raise k_max to evaluate here"
            )
        _, e = math.frexp(t)
        return max(-e, 0)

    def _piece_exact(self, t: Fraction) -> int:
        if t < Fraction(1, 2 ** (self.k_max + 1)):
            raise ResolutionError(f"t={t} lies below l_{self.k_max + 1}; raise k_max")
        k = 0
        while t < breakpoint(k + 1):
            k += 1
        return k

    def piece_eval(self, k: int, t, order: int = 0):
        """Derivative ``order`` of piece ``k`` at ``t`` (vectorized, any t)."""
        coef = self._scaled[k]
        if order:
            coef = np.polynomial.polynomial.polyder(coef, order)
        zeta = np.asarray(t, dtype=float) * 2.0 ** (k + 1)
        dev = np.polynomial.polynomial.polyval(zeta, coef) * 2.0 ** ((k + 1) * order)
        return _neg_sq(t, order) + dev

    # -- evaluation -----------------------------------------------------------

    def eval(self, t: float, order: int = 0) -> float:
        """Order 0..q derivative of ``f_1`` at ``t``."""
        t = float(t)
        if not -1.0 <= t <= 1.0:
            raise ValueError(f"t={t} outside [-1, 1]")
        if t <= 0.0:
            return float(_neg_sq(t, order))
        return float(self.piece_eval(self.piece_index(t), t, order))

    __call__ = eval

    def eval_f2(self, t: float, order: int = 0) -> float:
        """``f_2(t) = f_1(-t)`` and its derivatives."""
        return (-1) ** order * self.eval(-t, order)

    def eval_fmax(self, t: float) -> float:
        return max(self.eval(t), self.eval(-t))

    def eval_exact(self, t: Number, order: int = 0) -> Fraction:
        t = Fraction(t)
        if not -1 <= t <= 1:
            raise ValueError("t outside [-1, 1]")
        if t <= 0:
            return _neg_sq_exact(t, order)
        return self.pieces[self._piece_exact(t)].eval_exact(t, order)

    def fmax_exact(self, t: Number) -> Fraction:
        t = Fraction(t)
        return max(self.eval_exact(t), self.eval_exact(-t))

    def piece_tag(self, t: float) -> str:
        if t <= 0:
            return "tail"
        return "pk_even" if self.piece_index(t) % 2 == 0 else "pk_odd"

    def as_max_function(self) -> MaxFunction:
        """``max(f_1, f_2)`` as a generic :class:`MaxFunction`."""

        def f1(t, order, side):
            return self.eval(t, order) if order <= min(self.q, 3) else None

        def f2(t, order, side):
            return self.eval_f2(t, order) if order <= min(self.q, 3) else None

        q = min(self.q, 3)
        return MaxFunction(
            (
                ScalarFunction(f1, (-1.0, 1.0), q, (), "f1"),
                ScalarFunction(f2, (-1.0, 1.0), q, (), "f2"),
            ),
            (-1.0, 1.0),
            f"counterexample[{self.slopes.label}]",
        )


# -- verification -------------------------------------------------------------


def kink_gap(fn: CounterexampleFunction, k: int) -> float:
    """Right minus left derivative of ``f_max`` at ``t_k``.

    Two members cross there with slopes ``a`` and ``b``; for a max the
    right derivative is ``max(a, b)`` and the left one ``min(a, b)``, so
    the gap is ``|s_k - 1| * 2 t_k`` and nonnegative.  The same value
    holds at ``-t_k`` by symmetry.
    """
    tk = midpoint(k)
    a = fn.pieces[k].eval_exact(tk, 1)
    b = -2 * tk
    return float(abs(a - b))


def kink_gap_fd(fn: CounterexampleFunction, k: int, h: Optional[Fraction] = None,
                at_negative: bool = False) -> tuple[float, float, float]:
    """Exact-arithmetic one-sided difference quotients of ``f_max`` at ``+-t_k``.

    Returns ``(left, right, right - left)``.  The default step is tiny
    relative to the expected gap, so truncation error (about ``2h``) stays
    far below any double-precision tolerance.
    """
    tk = midpoint(k)
    if at_negative:
        tk = -tk
    if h is None:
        h = Fraction(1, 2 ** (3 * k + 80))
    f0 = fn.fmax_exact(tk)
    right = (fn.fmax_exact(tk + h) - f0) / h
    left = (f0 - fn.fmax_exact(tk - h)) / h
    return float(left), float(right), float(right - left)


@dataclass
class C3Report:
    slopes: str
    k_values: list
    per_breakpoint_jumps: list  # (k, [jump order 0..q])
    max_jump: float
    sup_top_deriv: list  # sup |f^(q)| on [l_{k+1}, l_k]
    sup_first_dev: list  # sup |f' + 2t| on [l_{k+1}, l_k]
    jumps_ok: bool
    c3_plausible: bool
    order: int = 3

    @property
    def sup_third_deriv_per_interval(self):
        return self.sup_top_deriv

    def as_dict(self):
        return {
            "slopes": self.slopes,
            "order": self.order,
            "k_values": self.k_values,
            "per_breakpoint_jumps": self.per_breakpoint_jumps,
            "max_jump": self.max_jump,
            "sup_top_deriv": self.sup_top_deriv,
            "sup_first_dev": self.sup_first_dev,
            "jumps_ok": self.jumps_ok,
            "c3_plausible": self.c3_plausible,
        }


def _grid(k: int, n: int = GRID_POINTS) -> np.ndarray:
    return np.linspace(2.0 ** -(k + 1), 2.0**-k, n)


def breakpoint_jumps(fn: CounterexampleFunction, k: int, max_order: int) -> list[float]:
    """Jumps of orders ``0..max_order`` at ``l_k`` between pieces ``k`` and ``k-1``.

    Each jump is divided by ``max(1, |value|)``.
    """
    lk = 2.0**-k
    out = []
    for d in range(max_order + 1):
        a = float(fn.piece_eval(k, lk, d))
        b = float(fn.piece_eval(k - 1, lk, d))
        out.append(abs(a - b) / max(1.0, abs(a), abs(b)))
    return out


def _trend_to_zero(sups: Sequence[float], ratio: float = 0.05) -> bool:
    if len(sups) < 2 or sups[0] == 0:
        return False
    slack = 1e-9 * sups[0]
    monotone = all(b <= a + slack for a, b in zip(sups, sups[1:]))
    return monotone and sups[-1] <= ratio * sups[0]


def verify_c3(fn: CounterexampleFunction, k_range: Iterable[int], jump_tol: float = 1e-8,
              order: Optional[int] = None) -> C3Report:
    """Breakpoint jump check plus the decay of sup |f^(order)| per piece.

    ``c3_plausible`` requires every jump below ``jump_tol`` and the sup of
    the top derivative to shrink monotonically to at most 5% of its first
    value across ``k_range``.
    """
    ks = list(k_range)
    if not ks or max(ks) > fn.k_max:
        raise ValueError(f"k_range must be nonempty and within 0..{fn.k_max}")
    order = fn.q if order is None else order
    jumps, sups, devs = [], [], []
    for k in ks:
        if k >= 1:
            jumps.append((k, breakpoint_jumps(fn, k, order)))
        ts = _grid(k)
        sups.append(float(np.max(np.abs(fn.piece_eval(k, ts, order)))))
        devs.append(float(np.max(np.abs(fn.piece_eval(k, ts, 1) + 2 * ts))))
    max_jump = max((max(j) for _, j in jumps), default=0.0)
    jumps_ok = max_jump <= jump_tol
    return C3Report(
        fn.slopes.label, ks, jumps, max_jump, sups, devs, jumps_ok,
        bool(jumps_ok and _trend_to_zero(sups)), order,
    )


def isolation_bound(k: int) -> float:
    """Upper bound on the rescaled derivative of piece ``k`` over ``zeta in [1, 2]``.

    Negative terms of the sum are evaluated at ``zeta = 1`` and positive
    ones at ``zeta = 2``; valid once ``z_2 - 4**k < 0`` (k >= 10).
    """
    z = Z_TABLE
    zt = {j: Fraction(j * z[j], 2 ** (j - 1)) for j in range(1, 10)}
    bound = (z[2] - 4**k) + sum(zt[j] for j in (1, 3, 5, 7, 9)) + sum(
        zt[j] * 2 ** (j - 1) for j in (4, 6, 8)
    )
    return float(bound / 8**k)


def rescaled_derivative(fn: CounterexampleFunction, k: int, zeta) -> np.ndarray:
    """``p_k'(l_{k+1} zeta)``, the quantity bounded by :func:`isolation_bound`."""
    return fn.piece_eval(k, np.asarray(zeta) * 2.0 ** -(k + 1), 1)


@dataclass
class IsolationReport:
    k_start: int
    k_end: int
    decreasing: dict  # k -> bool
    negative_on_grid: bool
    isolated: bool


def verify_isolated_max(fn: CounterexampleFunction, k_start: int, k_end: int) -> IsolationReport:
    """Grid check that each piece in ``k_start..k_end`` strictly decreases and
    that ``f_1 < 0`` on ``[l_{k_end+1}, 1]``."""
    if not 0 <= k_start <= k_end <= fn.k_max:
        raise ValueError("need 0 <= k_start <= k_end <= k_max")
    decreasing = {}
    for k in range(k_start, k_end + 1):
        ts = _grid(k)
        vals = fn.piece_eval(k, ts)
        slopes = fn.piece_eval(k, ts, 1)
        decreasing[k] = bool(np.all(np.diff(vals) < 0) and np.all(slopes < 0))
    negative = all(
        bool(np.all(fn.piece_eval(k, _grid(k)) < 0)) for k in range(0, k_end + 1)
    )
    ok = all(decreasing.values()) and negative
    return IsolationReport(k_start, k_end, decreasing, negative, ok)


@dataclass
class GeneralizeReport:
    q: int
    slopes: str
    k_values: list
    max_jump: float
    jumps_ok: bool
    sup_q_deriv: list
    decays: bool
    midpoint_slope_residuals: list
    decreasing: dict


def generalize_q(q: int, k_range: Iterable[int],
                 slope_rule: Optional[Callable[[int], Number]] = None) -> GeneralizeReport:
    """Degree ``2q+3`` analogue with the conjectured (or given) slopes.

    Reports jump sizes up to order ``q``, the per-piece sup of
    ``|f^(q)|`` and whether it decays; nothing is asserted.
    """
    if not 1 <= q <= 5:
        raise ValueError("q must be in 1..5")
    ks = list(k_range)
    slopes = SlopeSequence("custom" if slope_rule else "general_q", q=q, rule=slope_rule)
    fn = CounterexampleFunction(slopes, k_max=max(ks) + 1)
    rep = verify_c3(fn, ks, order=q)
    mid = []
    for k in ks:
        tk = midpoint(k)
        mid.append(float(abs(fn.pieces[k].eval_exact(tk, 1) - fn.slopes(k) * (-2 * tk))))
    decreasing = {
        k: bool(np.all(fn.piece_eval(k, _grid(k), 1) < 0)) for k in ks
    }
    return GeneralizeReport(q, slopes.label, ks, rep.max_jump, rep.jumps_ok, rep.sup_top_deriv,
                            _trend_to_zero(rep.sup_top_deriv), mid, decreasing)


# -- plot data ----------------------------------------------------------------

#: figure name -> (default slopes, column kind)
FIGURES = {
    "f1_only": ("constant_two", "f1"),
    "f1_and_f2": ("constant_two", "f1f2"),
    "derivs_a": ("appendix_b", "derivs"),
    "derivs_b": ("appendix_a", "derivs"),
    "fmax_and_derivs": ("appendix_a", "fmax"),
}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fmax_row(fn: CounterexampleFunction, t: float):
    a, b = fn.eval(t), fn.eval(-t)
    if a >= b:
        d = [fn.eval(t, o) for o in (1, 2)]
        tag = fn.piece_tag(t)
        val = a
    else:
        d = [fn.eval_f2(t, o) for o in (1, 2)]
        tag = fn.piece_tag(-t)
        val = b
    return [val, *d], tag


def emit_plot_data(figure: str, resolution: int, sink: TextIO,
                   fn: Optional[CounterexampleFunction] = None, k_max: int = 40) -> int:
    """Write CSV rows that reproduce one figure; returns the row count.

    Columns: ``f1_only`` -> t, value, piece_tag; ``f1_and_f2`` -> t, f1,
    f2, piece_tag, piece_tag_f2; ``derivs_*`` -> t, d1, d2, d3, piece_tag;
    ``fmax_and_derivs`` -> t, value, d1, d2, piece_tag.
    """
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    default_slopes, kind = FIGURES[figure]
    if fn is None:
        fn = CounterexampleFunction(default_slopes, k_max=k_max)
    headers = {
        "f1": ["t", "value", "piece_tag"],
        "f1f2": ["t", "f1", "f2", "piece_tag", "piece_tag_f2"],
        "derivs": ["t", "d1", "d2", "d3", "piece_tag"],
        "fmax": ["t", "value", "d1", "d2", "piece_tag"],
    }[kind]
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(headers)
    rows = 0
    for t in np.linspace(-1.0, 1.0, resolution):
        t = float(t)
        if 0 < abs(t) < fn.floor:
            t = 0.0
        if kind == "f1":
            row = [_fmt(t), _fmt(fn.eval(t)), fn.piece_tag(t)]
        elif kind == "f1f2":
            row = [_fmt(t), _fmt(fn.eval(t)), _fmt(fn.eval_f2(t)), fn.piece_tag(t), fn.piece_tag(-t)]
        elif kind == "derivs":
            row = [_fmt(t), *(_fmt(fn.eval(t, o)) for o in (1, 2, 3)), fn.piece_tag(t)]
        else:
            vals, tag = _fmax_row(fn, t)
            row = [_fmt(t), *(_fmt(v) for v in vals), tag]
        w.writerow(row)
        rows += 1
    return rows
