"""Univariate matrix families and their eigenvalue / singular value extrema.

Eigenvalues are recomputed by a dense Hermitian solver at every point; no
branch tracking is attempted.  Singular values go through the Gram family
``A^* A`` (or ``A A^*`` when A is wide) followed by a square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CapabilityError
from .lti import LtiSystem
from .report import SolveReport, empirical_order

__all__ = [
    "HermitianFamily",
    "MatrixFamily",
    "ExtremalFunction",
    "KINDS",
    "eval_extremal",
    "smoothness_probe",
    "ProbeReport",
    "local_refine",
    "scan_maximizers",
    "random_family",
]

HERMITIAN_TOL = 1e-13
CLUSTER_TOL = 1e-10
INNER_ZERO_TOL = 1e-12
SIGMA_MIN_GUARD = 1e-8
GOLDEN = (3.0 - math.sqrt(5.0)) / 2.0

KINDS = ("lambda_max", "lambda_min", "spec_radius", "inner_spec_radius", "sigma_max", "sigma_min")
MIN_KINDS = ("lambda_min", "inner_spec_radius", "sigma_min")


def _herm_check(h: np.ndarray, what: str = "H") -> None:
    scale = max(np.linalg.norm(h), 1.0)
    if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError(f"{what} is not Hermitian")


class HermitianFamily:
    """``t -> H(t)`` with Hermitian values.

    Build with :meth:`polynomial`, :meth:`rotated_diagonal`, :meth:`gram`
    or :meth:`from_callable`.
    """

    def __init__(self, func: Callable[[float], np.ndarray], n: int, representation: str,
                 data: Optional[dict] = None):
        self._func = func
        self.n = n
        self.representation = representation
        self.data = data or {}

    def __repr__(self):
        return f"HermitianFamily({self.representation}, n={self.n})"

    def __call__(self, t: float) -> np.ndarray:
        return self._func(float(t))

    @classmethod
    def polynomial(cls, coeffs: Sequence[np.ndarray]) -> "HermitianFamily":
        """``H(t) = sum_m H_m t^m``; every ``H_m`` must be Hermitian."""
        mats = [np.atleast_2d(np.asarray(c, dtype=complex)) for c in coeffs]
        if not mats:
            raise ValueError("need at least one coefficient matrix")
        n = mats[0].shape[0]
        for i, h in enumerate(mats):
            if h.shape != (n, n):
                raise ValueError("coefficient matrices must share one square shape")
            _herm_check(h, f"H_{i}")
        mats = [(h + h.conj().T) / 2 for h in mats]
        stack = np.array(mats)

        def func(t):
            acc = stack[-1].copy()
            for h in stack[-2::-1]:
                acc = acc * t + h
            return acc

        return cls(func, n, "polynomial", {"coeffs": stack})

    @classmethod
    def rotated_diagonal(cls, unitary: np.ndarray, curves: Sequence[Callable[[float], float]]
                         ) -> "HermitianFamily":
        """``U diag(c_1(t), ..., c_n(t)) U^*`` for a fixed unitary ``U``."""
        u = np.asarray(unitary, dtype=complex)
        n = u.shape[0]
        if u.shape != (n, n) or len(curves) != n:
            raise ValueError("unitary must be n x n with n curves")
        if not np.allclose(u.conj().T @ u, np.eye(n), atol=1e-12):
            raise ValueError("matrix is not unitary")
        curves = tuple(curves)

        def func(t):
            d = np.array([c(t) for c in curves], dtype=float)
            h = (u * d) @ u.conj().T
            return (h + h.conj().T) / 2

        return cls(func, n, "rotated_diagonal", {"unitary": u, "curves": curves})

    @classmethod
    def gram(cls, family: "MatrixFamily") -> "HermitianFamily":
        """``A^* A`` when ``m >= n``, else ``A A^*``."""
        wide = family.n > family.m

        def func(t):
            a = family(t)
            h = a @ a.conj().T if wide else a.conj().T @ a
            return (h + h.conj().T) / 2

        return cls(func, min(family.m, family.n), "wrapped", {"base": family})

    @classmethod
    def from_callable(cls, func: Callable[[float], np.ndarray], n: int, name: str = "callable"
                      ) -> "HermitianFamily":
        return cls(func, n, name)

    def negated(self) -> "HermitianFamily":
        return HermitianFamily(lambda t: -self._func(t), self.n, f"-{self.representation}")

    def curves_at(self, t: float) -> np.ndarray:
        """Stored eigencurves (rotated_diagonal families only)."""
        if self.representation != "rotated_diagonal":
            raise CapabilityError("only rotated_diagonal families store eigencurves")
        return np.array([c(t) for c in self.data["curves"]])


class MatrixFamily:
    """``t -> A(t)`` with ``m x n`` complex values."""

    def __init__(self, func: Callable[[float], np.ndarray], m: int, n: int, representation: str,
                 data: Optional[dict] = None):
        self._func = func
        self.m, self.n = m, n
        self.representation = representation
        self.data = data or {}

    def __repr__(self):
        return f"MatrixFamily({self.representation}, {self.m}x{self.n})"

    def __call__(self, t: float) -> np.ndarray:
        return self._func(float(t))

    @classmethod
    def polynomial(cls, coeffs: Sequence[np.ndarray]) -> "MatrixFamily":
        stack = np.array([np.atleast_2d(np.asarray(c, dtype=complex)) for c in coeffs])
        if stack.ndim != 3 or len(stack) == 0:
            raise ValueError("coefficients must be equally shaped matrices")

        def func(t):
            acc = stack[-1].copy()
            for a in stack[-2::-1]:
                acc = acc * t + a
            return acc

        return cls(func, stack.shape[1], stack.shape[2], "polynomial", {"coeffs": stack})

    @classmethod
    def transfer(cls, system: LtiSystem) -> "MatrixFamily":
        """``omega -> G(i omega)``; evaluating at a pole raises :class:`PoleError`."""
        return cls(lambda w: system(1j * w), system.p, system.m, "transfer_backed",
                   {"system": system})

    @classmethod
    def from_callable(cls, func, m: int, n: int, name: str = "callable") -> "MatrixFamily":
        return cls(func, m, n, name)


@dataclass(frozen=True)
class ExtremalFunction:
    """A scalar extremal function of a family, e.g. ``lambda_max o H``."""

    family: object
    kind: str = "lambda_max"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        needs_matrix = self.kind.startswith("sigma")
        if needs_matrix and not isinstance(self.family, MatrixFamily):
            raise TypeError(f"{self.kind} needs a MatrixFamily")
        if not needs_matrix and not isinstance(self.family, HermitianFamily):
            raise TypeError(f"{self.kind} needs a HermitianFamily")

    @property
    def sense(self) -> str:
        """'min' for kinds whose interesting extrema are minimizers."""
        return "min" if self.kind in MIN_KINDS else "max"

    def __call__(self, t: float) -> float:
        return eval_extremal(self, t)

    def eigenvalues(self, t: float) -> np.ndarray:
        """Ascending eigenvalues of H(t) (or of the Gram family for sigma kinds)."""
        if self.kind.startswith("sigma"):
            return np.linalg.eigvalsh(HermitianFamily.gram(self.family)(t))
        return np.linalg.eigvalsh(self.family(t))


def eval_extremal(f: ExtremalFunction, t: float) -> float:
    kind = f.kind
    if kind.startswith("sigma"):
        lam = np.linalg.eigvalsh(HermitianFamily.gram(f.family)(t))
        v = lam[-1] if kind == "sigma_max" else lam[0]
        return math.sqrt(max(float(v), 0.0))
    h = f.family(t)
    lam = np.linalg.eigvalsh(h)
    if kind == "lambda_max":
        return float(lam[-1])
    if kind == "lambda_min":
        return float(lam[0])
    if kind == "spec_radius":
        return float(max(lam[-1], -lam[0]))
    smallest = float(np.min(np.abs(lam)))
    if smallest <= INNER_ZERO_TOL * max(np.linalg.norm(h, 2), np.finfo(float).tiny):
        return 0.0
    return smallest


# -- smoothness probe ------------------------------------------------------------


@dataclass
class ProbeReport:
    x: float
    value: float
    kind: str
    steps: list
    fd_first: dict  # side -> list per step
    fd_second: dict
    first: dict  # side -> selected estimate
    second: dict
    selected_step: dict
    lipschitz_estimate: float
    cluster_size: int
    smooth: Optional[bool]
    status: str = "ok"
    metadata: dict = field(default_factory=dict)

    def as_dict(self):
        from .report import _plain

        return _plain(self.__dict__)


def _one_sided(f, x, h, side):
    f0, f1, f2, f3 = (f(x + side * j * h) for j in range(4))
    first = side * (-3 * f0 + 4 * f1 - f2) / (2 * h)
    second = (2 * f0 - 5 * f1 + 4 * f2 - f3) / (h * h)
    return first, second, max(abs(f0), abs(f1), abs(f2), abs(f3))


def _select(estimates, steps, mags, ncoef):
    """Index whose estimate changed least versus the neighbouring step,
    penalized by a rounding bound ``ncoef * eps * |f| / h^k``."""
    eps = np.finfo(float).eps
    best, best_err = 0, math.inf
    for i in range(1, len(estimates)):
        err = abs(estimates[i] - estimates[i - 1]) + ncoef[0] * eps * mags[i] / steps[i] ** ncoef[1]
        if err < best_err:
            best, best_err = i, err
    return best


def smoothness_probe(f: ExtremalFunction, x: float, steps: Optional[Sequence[float]] = None,
                     tol_match: float = 1e-4, lipschitz_width: float = 1e-3) -> ProbeReport:
    """One-sided first and second differences of ``f`` around ``x``.

    Both one-sided formulas are second order accurate.  For each side the
    step with the smallest change against its neighbour (plus a rounding
    penalty) is selected; ``smooth`` requires the selected left/right first
    and second estimates to agree within ``tol_match * (1 + scale)``.
    ``steps`` defaults to ``2**-4 .. 2**-26``.
    """
    steps = [2.0**-i for i in range(4, 27)] if steps is None else list(steps)
    value = f(x)
    fd1, fd2, sel1, sel2, chosen = {}, {}, {}, {}, {}
    for name, side in (("left", -1), ("right", 1)):
        rows = [_one_sided(f, x, h, side) for h in steps]
        firsts = [r[0] for r in rows]
        seconds = [r[1] for r in rows]
        mags = [r[2] for r in rows]
        fd1[name], fd2[name] = firsts, seconds
        i1 = _select(firsts, steps, mags, (8, 1))
        i2 = _select(seconds, steps, mags, (12, 2))
        sel1[name], sel2[name] = firsts[i1], seconds[i2]
        chosen[name] = {"first": steps[i1], "second": steps[i2]}

    lam = f.eigenvalues(x)
    if f.kind.startswith("sigma"):
        lam = np.sqrt(np.clip(lam, 0, None))
    target = {"lambda_min": lam[0], "sigma_min": lam[0]}.get(f.kind, lam[-1])
    if f.kind in ("spec_radius", "inner_spec_radius"):
        lam = np.abs(lam)
        target = value
    cluster = int(np.sum(np.abs(lam - target) <= CLUSTER_TOL * max(1.0, np.max(np.abs(lam)))))

    w = lipschitz_width
    pts = x + w * np.arange(-4, 5)
    curv = [(f(p + w) - 2 * f(p) + f(p - w)) / (w * w) for p in pts]
    lip = float(np.max(np.abs(np.diff(curv))) / w)

    status = "ok"
    smooth: Optional[bool]
    if f.kind == "sigma_min":
        family_norm = max(np.linalg.norm(f.family(x), 2), np.finfo(float).tiny)
        if value <= SIGMA_MIN_GUARD * family_norm:
            status, smooth = "assumption violated: minimal value is zero", None
    if status == "ok":
        scale = max(abs(value), abs(sel2["left"]), abs(sel2["right"]))
        tol = tol_match * (1.0 + scale)
        smooth = bool(
            abs(sel1["left"] - sel1["right"]) <= tol and abs(sel2["left"] - sel2["right"]) <= tol
        )
    return ProbeReport(
        float(x), float(value), f.kind, steps, fd1, fd2, sel1, sel2, chosen, lip, cluster,
        smooth, status, {"step_floor": min(steps), "tol_match": tol_match,
                         "formula": "second-order one-sided differences"},
    )


# -- local refinement ----------------------------------------------------------------


def local_refine(f: Callable[[float], float], bracket: Sequence[float], tol: float = 1e-10,
                 maximize: bool = True, max_iter: int = 200, golden_steps: int = 6) -> SolveReport:
    """Locate a local extremum in ``bracket`` by golden sections, then
    safeguarded successive parabolic interpolation.

    Report fields: ``location`` is the extremizer, ``optimum`` the value,
    ``status`` is ``'converged'`` or ``'endpoint'`` when the best point
    sits on the bracket boundary, ``extra['second_derivative']`` a final
    curvature estimate.
    """
    a, b = map(float, bracket)
    if not a < b:
        raise ValueError("bracket must satisfy a < b")
    sgn = -1.0 if maximize else 1.0

    def g(t):
        return sgn * f(t)

    history = []
    # golden-section warm start on (a, b)
    x = w = v = a + GOLDEN * (b - a)
    fx = fw = fv = g(x)
    for _ in range(golden_steps):
        if x - a > b - x:
            u = x - GOLDEN * (x - a)
        else:
            u = x + GOLDEN * (b - x)
        fu = g(u)
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            else:
                v, fv = u, fu
        history.append({"x": x, "value": sgn * fx, "width": b - a, "step": "golden"})

    d = e = 0.0
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        tol1 = tol * 0.5 + 2.0 * np.finfo(float).eps * abs(x)
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        kind = "golden"
        if abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            q = abs(q)
            etemp, e = e, d
            if abs(p) < abs(0.5 * q * etemp) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                kind = "parabolic"
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < m else -tol1
            else:
                e = (a - x) if x >= m else (b - x)
                d = GOLDEN * e
        else:
            e = (a - x) if x >= m else (b - x)
            d = GOLDEN * e
        u = x + (d if abs(d) >= tol1 else math.copysign(tol1, d))
        fu = g(u)
        if fu <= fx:
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
        history.append({"x": x, "value": sgn * fx, "width": b - a, "step": kind})

    lo, hi = map(float, bracket)
    status = "converged"
    edge = 4 * tol + 1e-12 * (abs(lo) + abs(hi))
    for end in (lo, hi):
        if abs(x - end) <= edge:
            status = "endpoint"
    h = min(1e-4 * max(1.0, abs(x)), 0.25 * (hi - lo))
    try:
        curvature = (f(x + h) - 2 * sgn * fx + f(x - h)) / (h * h)
    except Exception:  # outside the function's domain
        curvature = math.nan
    xs = [row["x"] for row in history]
    try:
        order = empirical_order(xs + [x], limit=x)
    except ValueError:
        order = math.nan
    return SolveReport(
        optimum=float(sgn * fx),
        location=float(x),
        iterations=history,
        certificates=[(row["x"], row["value"]) for row in history],
        empirical_order=order,
        status=status,
        sense="max" if maximize else "min",
        extra={"second_derivative": float(curvature), "bracket": [lo, hi]},
    )


def scan_maximizers(f: Callable[[float], float], interval: Sequence[float], samples: int = 2001,
                    tol: float = 1e-10, maximize: bool = True) -> list[SolveReport]:
    """Interior local maximizers (minimizers) from a dense scan plus refinement."""
    lo, hi = map(float, interval)
    ts = np.linspace(lo, hi, samples)
    sgn = 1.0 if maximize else -1.0
    vals = sgn * np.array([f(t) for t in ts])
    found = []
    for i in range(1, samples - 1):
        if vals[i] >= vals[i - 1] and vals[i] > vals[i + 1]:
            rep = local_refine(f, (ts[i - 1], ts[i + 1]), tol=tol, maximize=maximize)
            if rep.status == "converged" and lo < rep.location < hi:
                found.append(rep)
    return found


def random_family(seed: int, n: int, degree: int, kind: str = "hermitian",
                  m: Optional[int] = None, concave: bool = False):
    """Reproducible random polynomial family with O(1) entries.

    ``kind='hermitian'`` gives a :class:`HermitianFamily` (coefficients
    symmetrized exactly); ``kind='general'`` a ``m x n``
    :class:`MatrixFamily`.  With ``concave`` (Hermitian, degree >= 2) the
    ``t^2`` coefficient is redrawn negative definite, ``-(Z Z^*/n + I)``,
    so ``lambda_max`` has interior local maximizers; lambda_max of an
    affine family is convex and generic draws rarely have any.
    """
    if n < 1 or degree < 0:
        raise ValueError("need n >= 1 and degree >= 0")
    rng = np.random.default_rng(seed)
    if kind == "hermitian":
        coeffs = []
        for _ in range(degree + 1):
            z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            coeffs.append((z + z.conj().T) / 2)
        if concave:
            if degree < 2:
                raise ValueError("concave families need degree >= 2")
            z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            coeffs[2] = -(z @ z.conj().T) / n - np.eye(n)
        return HermitianFamily.polynomial(coeffs)
    if kind == "general":
        m = n if m is None else m
        coeffs = [
            (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / math.sqrt(2)
            for _ in range(degree + 1)
        ]
        return MatrixFamily.polynomial(coeffs)
    raise ValueError(f"unknown family kind {kind!r}")
