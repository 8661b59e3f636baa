import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from eigsmooth import CapabilityError, DomainError, MaxFunction, ScalarFunction
from eigsmooth import maxfun
from eigsmooth.counterexample import CounterexampleFunction, SlopeSequence, midpoint


def poly(*coeffs):
    p = np.polynomial.Polynomial(coeffs)
    return ScalarFunction.from_derivatives([p, p.deriv(1), p.deriv(2), p.deriv(3)])


@pytest.fixture
def two_piece():
    return maxfun.builtin_family("two_piece_c1")


def test_eval_max_tie_at_zero():
    F = MaxFunction((poly(0, 0, -1), poly(0, 0, -2)))
    assert maxfun.eval_max(F, 0.0) == (0.0, frozenset({0, 1}))


def test_eval_max_two_piece(two_piece):
    assert maxfun.eval_max(two_piece, -1.0) == (-1.0, frozenset({0}))
    assert maxfun.eval_max(two_piece, 1.0) == (-2.0, frozenset({1}))


def test_builtin_two_piece_members(two_piece):
    assert list(two_piece.values(-1.0)) == [-1.0, -2.0]
    assert list(two_piece.values(1.0)) == [-3.0, -2.0]


def test_active_set(two_piece):
    act = maxfun.active_set(two_piece, 0.0, 1e-12)
    assert act.indices == frozenset({0, 1}) and act.gamma == 0.0
    F = MaxFunction((poly(0, 0, -1), poly(-1, 0, -2)))
    assert maxfun.active_set(F, 0.0, 1e-12).indices == frozenset({0})


def test_active_set_at_counterexample_crossing():
    fn = CounterexampleFunction(SlopeSequence("appendix_a"), k_max=20)
    F = fn.as_max_function()
    for k in (2, 7, 15):
        assert maxfun.active_set(F, float(midpoint(k))).indices == frozenset({0, 1})


def test_stationarity(two_piece):
    steps = [2.0**-i for i in range(1, 21)]
    assert maxfun.stationarity_check(two_piece, 0.0, steps).converges_to_zero
    rep = maxfun.stationarity_check(maxfun.builtin_family("neg_abs"), 0.0)
    assert not rep.converges_to_zero
    assert all(fwd == -1.0 and bwd == 1.0 for _, fwd, bwd in rep.fd_quotients)
    lin = MaxFunction((poly(0, 1),))
    rep = maxfun.stationarity_check(lin, 0.0)
    assert not rep.converges_to_zero
    assert rep.fd_quotients[-1][1] == pytest.approx(1.0)


def test_stationarity_bad_schedule(two_piece):
    with pytest.raises(ValueError):
        maxfun.stationarity_check(two_piece, 0.0, [])
    with pytest.raises(ValueError):
        maxfun.stationarity_check(two_piece, 0.0, [0.1, 0.2])


def test_quadratic_model_examples(two_piece):
    assert maxfun.quadratic_model(MaxFunction((poly(0, 0, -2),)), 0.0).curvature == -2.0
    assert maxfun.quadratic_model(MaxFunction((poly(0, 0, -1), poly(0, 0, -2))), 0.0).curvature == -1.0
    # one-sided second derivatives only: per-side models
    assert maxfun.quadratic_model(two_piece, 0.0, side=-1).curvature == -1.0
    assert maxfun.quadratic_model(two_piece, 0.0, side=1).curvature == -2.0
    with pytest.raises(CapabilityError):
        maxfun.quadratic_model(two_piece, 0.0)


def test_two_piece_second_quotients(two_piece):
    for eps, want in ((-1e-4, -2.0), (1e-4, -4.0)):
        val, _ = maxfun.eval_max(two_piece, eps)
        assert 2 * val / eps**2 == pytest.approx(want, rel=1e-9)


def test_expansion_residual():
    rep = maxfun.expansion_residual(MaxFunction((poly(0, 0, -2),)), 0.0, maxfun.dyadic_steps(4, 20))
    assert all(r == 0 for r in rep.residuals) and rep.fitted_order == math.inf
    F = MaxFunction((poly(0, 0, -1, 1), poly(0, 0, -1, -1)))
    rep = maxfun.expansion_residual(F, 0.0, maxfun.dyadic_steps(2, 14))
    assert abs(rep.fitted_order - 3) <= 0.2


def test_expansion_residual_counterexample():
    fn = CounterexampleFunction(SlopeSequence("appendix_a"), k_max=30)
    rep = maxfun.expansion_residual(fn.as_max_function(), 0.0, maxfun.dyadic_steps(3, 25))
    assert rep.fitted_order >= 2


def test_neg_abs(two_piece):
    F = maxfun.builtin_family("neg_abs")
    assert maxfun.eval_max(F, 0.0)[0] == 0.0


def test_unknown_family():
    with pytest.raises(ValueError):
        maxfun.builtin_family("nope")


def test_scalar_function_breakpoint_rules():
    f = ScalarFunction.piecewise(0.0, poly(0, 0, -1), poly(0, 0, -3), 1)
    assert f.deriv(0.0, 1) == 0.0
    with pytest.raises(CapabilityError):
        f.deriv(0.0, 2)
    assert f.deriv(0.0, 2, side=-1) == -2.0
    assert f.deriv(0.0, 2, side=1) == -6.0
    g = ScalarFunction.from_derivatives([np.polynomial.Polynomial([1.0])], domain=(0.0, 1.0))
    with pytest.raises(DomainError):
        g(2.0)


def test_sin_pair_derivatives_against_sympy():
    t = sp.symbols("t")
    F = maxfun.builtin_family("remark_sin_pair")
    for member, a in zip(F.members, (1, sp.Rational(1, 2))):
        expr = t**8 * (sp.sin(a / t) - 1)
        for order in range(4):
            d = sp.lambdify(t, sp.diff(expr, t, order))
            for x in (0.3, -0.7, 0.05):
                assert member.deriv(x, order) == pytest.approx(float(d(x)), rel=1e-10, abs=1e-300)
        for order in range(4):
            assert member.deriv(0.0, order) == 0.0


def test_sin_pair_stationary_at_zero():
    F = maxfun.builtin_family("remark_sin_pair")
    assert maxfun.stationarity_check(F, 0.0, maxfun.dyadic_steps(1, 30)).converges_to_zero


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3, allow_nan=False))
def test_eval_max_dominates_members(t):
    for name in ("two_piece_c1", "remark_sin_pair", "neg_abs"):
        F = maxfun.builtin_family(name)
        if name == "remark_sin_pair" and t == 0.0:
            continue
        val, idx = maxfun.eval_max(F, t)
        vals = F.values(t)
        assert np.all(val >= vals)
        assert idx and all(vals[i] == val for i in idx)


def test_model_nonpositive_at_maximizers(two_piece):
    for side in (-1, 1):
        assert maxfun.quadratic_model(two_piece, 0.0, side=side).curvature <= 1e-10
