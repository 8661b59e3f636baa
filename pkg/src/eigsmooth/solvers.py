"""H-infinity norm, numerical radius and passivity margin.

All three reduce to global optimization of an extremal eigenvalue or
singular value function of a one-parameter Hermitian family, which is
C^2 near its maximizers; the level-set iteration in :mod:`.levelset`
then converges quadratically.

Frequency problems over the whole real line are solved in the variable
``s in [-1, 1]`` with ``omega = scale * tan(pi s / 2)``, so ``s = +-1``
is ``omega = +-inf`` where ``G`` equals ``D``.
"""

from __future__ import annotations

import math

import numpy as np

from .eigfamily import ExtremalFunction, HermitianFamily, MatrixFamily, eval_extremal, local_refine
from .errors import PreconditionError
from .levelset import levelset_maximize
from .lti import LtiSystem
from .report import SolveReport, empirical_order

__all__ = [
    "hinf_norm",
    "numerical_radius",
    "numerical_radius_family",
    "passivity_gamma",
    "passivity_margin",
    "frequency_map",
]

HINF_TOL = 1e-8
NUMRAD_TOL = 1e-8
XI_TOL = 1e-6


def frequency_map(system: LtiSystem):
    """``(to_omega, to_s, scale)`` for the compactified frequency axis."""
    poles = system.poles() if system.n else np.array([])
    scale = float(np.max(np.abs(poles))) if len(poles) else 1.0
    scale = scale if scale > 0 else 1.0

    def to_omega(s):
        if s >= 1.0:
            return math.inf
        if s <= -1.0:
            return -math.inf
        return scale * math.tan(0.5 * math.pi * s)

    def to_s(w):
        return 2.0 / math.pi * math.atan(w / scale)

    return to_omega, to_s, scale


def _frequency_seeds(system: LtiSystem, to_s):
    """Sample points clustered around the resonance of every pole."""
    seeds = [0.0]
    for lam in system.poles() if system.n else []:
        width = max(abs(lam.real), 1e-12)
        for c in (0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0, -4.0, 4.0):
            seeds.append(to_s(lam.imag + c * width))
            seeds.append(to_s(-lam.imag + c * width))
    return seeds


def _on_frequency_axis(fn, to_omega, at_infinity):
    def g(s):
        w = to_omega(s)
        return at_infinity if math.isinf(w) else fn(w)

    return g


def _hinf_grid(sys, g, to_omega, to_s, tol, points=20001):
    ss = np.linspace(-1.0, 1.0, points)
    vals = np.array([g(s) for s in ss])
    order = np.argsort(vals)[::-1][:5]
    best = SolveReport(float(vals[order[0]]), to_omega(ss[order[0]]), status="converged")
    best.certificates = [(to_omega(ss[i]), float(vals[i])) for i in order]
    h = ss[1] - ss[0]
    for i in order:
        a, b = max(ss[i] - h, -1.0), min(ss[i] + h, 1.0)
        rep = local_refine(g, (a, b), tol=1e-13)
        if rep.optimum > best.optimum:
            best.optimum, best.location = rep.optimum, to_omega(rep.location)
    best.extra = {"method": "grid", "points": points}
    return best


def hinf_norm(system: LtiSystem, tol: float = HINF_TOL, method: str = "levelset") -> SolveReport:
    """``max_omega sigma_max(G(i omega))`` for a stable system.

    ``location`` is the maximizing frequency (``inf`` when the peak is
    the feedthrough ``D``).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    system.require_stable()
    family = MatrixFamily.transfer(system)
    sigma = ExtremalFunction(family, "sigma_max")
    d_norm = eval_extremal(ExtremalFunction(MatrixFamily.polynomial([system.D]), "sigma_max"), 0.0)
    to_omega, to_s, scale = frequency_map(system)
    g = _on_frequency_axis(sigma, to_omega, d_norm)
    if method == "grid":
        return _hinf_grid(system, g, to_omega, to_s, tol)
    if method != "levelset":
        raise ValueError(f"unknown method {method!r}")

    # initial level from omega = 0 and the most resonant pole
    starts = [0.0]
    poles = system.poles()
    ratios = np.abs(poles.imag / poles.real) / np.maximum(np.abs(poles), 1e-300)
    p = poles[int(np.argmax(ratios))]
    starts.append(to_s(abs(p.imag) if p.imag != 0 else abs(p)))
    rep = levelset_maximize(
        g, -1.0, 1.0, tol=tol, start_points=starts, seeds=_frequency_seeds(system, to_s),
        to_user=to_omega,
    )
    rep.extra.update({"method": "levelset", "frequency_scale": scale, "d_norm": d_norm})
    return rep


def numerical_radius_family(a: np.ndarray) -> HermitianFamily:
    """``H(theta) = (e^{i theta} A + e^{-i theta} A^*) / 2``."""
    a = np.asarray(a, dtype=complex)
    ah = a.conj().T

    def func(theta):
        z = complex(math.cos(theta), math.sin(theta))
        h = 0.5 * (z * a + z.conjugate() * ah)
        return (h + h.conj().T) / 2

    return HermitianFamily.from_callable(func, a.shape[0], "numerical_radius")


def numerical_radius(a: np.ndarray, tol: float = NUMRAD_TOL, form: str = "lambda_max",
                     method: str = "levelset") -> SolveReport:
    """``r(A) = max_theta lambda_max(H(theta))`` over ``[0, 2 pi)``, or with
    ``form='spec_radius'`` ``max rho(H(theta))`` over ``[0, pi)``."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.shape[0] != a.shape[1]:
        raise ValueError("A must be square")
    if tol <= 0:
        raise ValueError("tol must be positive")
    fam = numerical_radius_family(a)
    if form == "lambda_max":
        f, period = ExtremalFunction(fam, "lambda_max"), 2 * math.pi
    elif form == "spec_radius":
        f, period = ExtremalFunction(fam, "spec_radius"), math.pi
    else:
        raise ValueError(f"unknown form {form!r}")
    if method == "grid":
        ts = np.linspace(0.0, period, 4097)
        vals = np.array([f(t) for t in ts])
        i = int(np.argmax(vals))
        h = ts[1] - ts[0]
        rep = local_refine(f, (ts[i] - h, ts[i] + h), tol=1e-13)
        rep.optimum = max(rep.optimum, float(vals[i]))
        rep.location = rep.location % period
        rep.extra.update({"method": "grid", "form": form})
        return rep
    if method != "levelset":
        raise ValueError(f"unknown method {method!r}")
    rep = levelset_maximize(f, 0.0, period, tol=tol, periodic=True, init_samples=256)
    rep.extra.update({"method": "levelset", "form": form})
    return rep


# -- passivity -------------------------------------------------------------------


def passivity_gamma(system: LtiSystem, xi: float, tol: float = XI_TOL / 100) -> SolveReport:
    """``gamma(xi) = min_omega lambda_min(G_xi(i omega)^* + G_xi(i omega))``.

    Works whether or not ``A + xi/2 I`` is stable; only poles on the
    imaginary axis raise :class:`PoleError`.
    """
    shifted = system.shifted(xi)
    family = MatrixFamily.transfer(shifted)

    def herm(w):
        g = family(w)
        return g.conj().T + g

    lam_min = ExtremalFunction(HermitianFamily.from_callable(herm, system.m, "passivity"), "lambda_min")
    d = shifted.D
    at_inf = float(np.linalg.eigvalsh(d.conj().T + d)[0])
    to_omega, to_s, _ = frequency_map(shifted)
    g = _on_frequency_axis(lambda w: -lam_min(w), to_omega, -at_inf)
    rep = levelset_maximize(
        g, -1.0, 1.0, tol=tol, start_points=[0.0], seeds=_frequency_seeds(shifted, to_s),
        to_user=to_omega,
    )
    return SolveReport(
        optimum=-rep.optimum,
        location=rep.location,
        iterations=rep.iterations,
        certificates=[(x, -v) for x, v in rep.certificates],
        empirical_order=rep.empirical_order,
        status=rep.status,
        sense="min",
        extra={"xi": xi},
    )


def passivity_margin(system: LtiSystem, tol: float = XI_TOL, max_iter: int = 200) -> SolveReport:
    """Root ``Xi`` of ``gamma(xi)`` by safeguarded secant inside a sign-change bracket.

    The bracket grows geometrically from ``xi = 0``.  Shifts that make
    ``A + xi/2 I`` unstable count as the nonpassive side.  The root is
    assumed unique; ``status`` flags any extra sign change seen on a
    check grid below the root.
    """
    if system.m != system.p:
        raise PreconditionError("passivity needs as many inputs as outputs")
    system.require_stable()
    inner_tol = tol / 100
    poles = system.poles()
    xi_stab = 2.0 * float(np.min(-poles.real)) if system.n else math.inf

    evals = {}

    def gamma(xi):
        if xi >= xi_stab:
            return None  # unstable shift
        if xi not in evals:
            evals[xi] = passivity_gamma(system, xi, inner_tol).optimum
        return evals[xi]

    g0 = gamma(0.0)
    if not g0 > 0:
        raise PreconditionError(f"not strictly passive at xi=0 (gamma(0) = {g0:.6g})")

    lo, glo = 0.0, g0
    step = max(1.0, abs(g0))
    hi, ghi = None, None
    history = [{"xi": 0.0, "gamma": g0, "bracket": None}]
    while hi is None:
        cand = min(lo + step, xi_stab)
        gc = gamma(cand)
        history.append({"xi": cand, "gamma": gc, "bracket": None})
        if gc is None or gc <= 0:
            hi, ghi = cand, gc
        else:
            lo, glo = cand, gc
            step *= 2.0
        if len(history) > 100:
            raise PreconditionError("no sign change found for gamma(xi)")

    best_x, best_g = lo, glo
    last, repeats = None, 0
    for _ in range(max_iter):
        if hi - lo <= 0.1 * tol:
            break
        x = 0.5 * (lo + hi)
        secant = False
        if ghi is not None and repeats < 2:
            sec = hi - ghi * (hi - lo) / (ghi - glo)
            if lo < sec < hi:
                x, secant = sec, True
        gx = gamma(x)
        history.append({"xi": x, "gamma": gx, "bracket": [lo, hi]})
        moved = "hi" if gx is None or gx <= 0 else "lo"
        if moved == "hi":
            hi, ghi = x, gx
        else:
            lo, glo = x, gx
        # two secant moves of the same endpoint in a row: bisect next
        repeats = repeats + 1 if (secant and moved == last) else 0
        last = moved
        if gx is not None and abs(gx) < abs(best_g):
            best_x, best_g = x, gx
        if gx is not None and abs(gx) <= 0.1 * tol:
            break

    root = lo if ghi is None else best_x
    g_root = glo if ghi is None else best_g
    status = "converged"
    checks = np.linspace(0.0, root, 7)[1:-1]
    signs = [gamma(float(c)) for c in checks]
    if any(s is not None and s <= 0 for s in signs):
        status = "multiple sign changes"
    xi_hist = [h["xi"] for h in history if h["gamma"] is not None]
    try:
        order = empirical_order(xi_hist[-8:] + [root], limit=root)
    except ValueError:
        order = math.nan
    return SolveReport(
        optimum=float(root),
        location=float(root),
        iterations=history,
        certificates=[(float(c), s) for c, s in zip(checks, signs)],
        empirical_order=order,
        status=status,
        sense="root",
        extra={"gamma_at_root": g_root, "bracket": [lo, hi], "xi_stability_limit": xi_stab,
               "gamma0": g0},
    )
