"""Acceptance criteria 1-10, one test each.

Every test records a ``PASS``/``FAIL`` line; the lines are printed in the
pytest terminal summary and when this file is run as a script.
"""

import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import unitary_group

from eigsmooth import ExtremalFunction, HermitianFamily, LtiSystem
from eigsmooth import counterexample as ce
from eigsmooth.counterexample import CounterexampleFunction, SlopeSequence
from eigsmooth.eigfamily import eval_extremal, random_family, scan_maximizers, smoothness_probe
from eigsmooth.lti import random_system
from eigsmooth.solvers import hinf_norm, numerical_radius, passivity_gamma, passivity_margin

import oracles

RESULTS = {}

Z_FROZEN = [4608, -61440, 359424, -1210368, 2585088, -3631104, 3354624, -1966080, 663552, -98304]


def record(n, ok, detail):
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


def test_criterion_01_coefficient_identity():
    t0 = time.perf_counter()
    worst = 0.0
    seq = SlopeSequence("appendix_a")
    for k in range(26):
        exact = ce.solve_pk(k, seq(k)).coeffs
        closed = ce.closed_form_coeffs(k, "appendix_a").coeffs
        for a, b in zip(exact, closed):
            rel = abs(a - b) / abs(b) if b else abs(a - b)
            worst = max(worst, float(rel))
    k0 = list(ce.solve_pk(0, seq(0)).coeffs)
    table_ok = k0 == [Fraction(z - 1 if j == 2 else z) for j, z in enumerate(Z_FROZEN)]
    dt = time.perf_counter() - t0
    record(1, worst <= 1e-9 and table_ok and dt < 5,
           f"max rel error {worst:.1e}, k=0 table exact {table_ok}, {dt:.2f}s")


def test_criterion_02_piece_constraints():
    fn = CounterexampleFunction(SlopeSequence("appendix_a"), k_max=25)
    worst = max(max(abs(r) for r in p.rounded_residuals()) for p in fn.pieces[:26])
    record(2, worst <= 1e-9, f"max rounded residual {worst:.1e} over k=0..25")


def test_criterion_03_c3_evidence():
    t0 = time.perf_counter()
    ks = range(5, 19)
    ra = ce.verify_c3(CounterexampleFunction(SlopeSequence("appendix_a"), 18), ks)
    sa = ra.sup_third_deriv_per_interval
    decreasing = all(b < a for a, b in zip(sa, sa[1:]))
    below = sa[-1] < 0.05 * sa[0]
    rb = ce.verify_c3(CounterexampleFunction(SlopeSequence("appendix_b"), 18), ks)
    sb = rb.sup_third_deriv_per_interval
    b_no_decay = min(sb) >= 0.5 * sb[0]
    dt = time.perf_counter() - t0
    ok = decreasing and below and ra.max_jump <= 1e-8 and b_no_decay and dt < 10
    record(3, ok, f"a: sup ratio k18/k5 {sa[-1] / sa[0]:.1e}, jumps {ra.max_jump:.1e}; "
                  f"b: min/first {min(sb) / sb[0]:.2f}; {dt:.2f}s")


def test_criterion_04_isolated_maximizer():
    bounds = [ce.isolation_bound(k) for k in range(13, 31)]
    first = next(k for k in range(64) if ce.Z_TABLE[2] - 4**k < 0)
    fn = CounterexampleFunction(SlopeSequence("appendix_a"), 30)
    rep = ce.verify_isolated_max(fn, 13, 30)
    ok = max(bounds) < 0 and first == 10 and all(rep.decreasing.values())
    record(4, ok, f"max bound {max(bounds):.2e}, first negative z2-4^k at k={first}, "
                  f"grid decreasing {all(rep.decreasing.values())}")


def test_criterion_05_kinks_and_stationarity():
    fn = CounterexampleFunction(SlopeSequence("appendix_a"), 40)
    worst = 0.0
    for k in (3, 10, 17):
        want = (SlopeSequence("appendix_a")(k) - 1) * 2 * ce.midpoint(k)
        _, _, gap = ce.kink_gap_fd(fn, k)
        worst = max(worst, abs(gap - float(want)) / float(want))
    stat = all(
        abs(fn.eval_fmax(s * 2.0**-i) / (s * 2.0**-i)) <= 2 * 2.0**-i
        for i in range(1, 31) for s in (1, -1)
    )
    record(5, worst <= 1e-10 and stat, f"kink gap rel error {worst:.1e}, stationarity bound holds {stat}")


def test_criterion_06_smoothness_at_maximizers():
    t0 = time.perf_counter()
    probes = fails = 0
    for seed in range(20):
        f = ExtremalFunction(random_family(seed, 8, 3, concave=True), "lambda_max")
        for rep in scan_maximizers(f, (-2.0, 2.0), samples=1001):
            probes += 1
            p = smoothness_probe(f, rep.location)
            if not p.smooth:
                fails += 1
    U = unitary_group.rvs(2, random_state=5)
    dbl = HermitianFamily.rotated_diagonal(U, [lambda t: -t * t, lambda t: -t * t + t**3])
    pd = smoothness_probe(ExtremalFunction(dbl, "lambda_max"), 0.0)
    dbl_ok = pd.smooth is True and all(abs(pd.second[s] + 2) <= 1e-3 for s in ("left", "right"))
    kink = HermitianFamily.polynomial([np.zeros((2, 2)), np.diag([1.0, -1.0])])
    pk = smoothness_probe(ExtremalFunction(kink, "lambda_max"), 0.0)
    kink_ok = pk.smooth is False and abs(pk.first["left"] + 1) < 1e-8 and abs(pk.first["right"] - 1) < 1e-8
    dt = time.perf_counter() - t0
    ok = probes > 0 and fails == 0 and dbl_ok and kink_ok and dt < 30
    record(6, ok, f"{probes - fails}/{probes} random maximizers smooth; double eigenvalue "
                  f"fd_second {pd.second['left']:.5f}/{pd.second['right']:.5f}; "
                  f"kink first diffs {pk.first['left']:.3f}/{pk.first['right']:.3f}; {dt:.1f}s")


def test_criterion_07_hinf():
    one = np.ones((1, 1))
    lag = hinf_norm(LtiSystem(-one, one, one, 0 * one)).optimum
    rng = np.random.default_rng(2)
    D = rng.standard_normal((3, 2))
    s0 = LtiSystem(random_system(2, 4, 2, 3).A, np.zeros((4, 2)), rng.standard_normal((3, 4)), D)
    zero_b = hinf_norm(s0).optimum
    want = np.linalg.svd(D, compute_uv=False)[0]
    s42 = random_system(42, 6, 2, 2)
    rep = hinf_norm(s42)
    oracle = oracles.hinf_dense(s42)
    ok = (abs(lag - 1) <= 1e-8 and abs(zero_b - want) <= 2 * np.finfo(float).eps * want
          and abs(rep.optimum - oracle) <= 1e-6 and rep.empirical_order >= 1.5)
    record(7, ok, f"lag {lag!r}; B=0 diff {abs(zero_b - want):.1e}; seed 42 vs oracle "
                  f"{abs(rep.optimum - oracle):.1e}; order {rep.empirical_order:.2f}")


def test_criterion_08_numerical_radius():
    jordan = numerical_radius(np.array([[0, 1], [0, 0]]), tol=1e-10).optimum
    herm = numerical_radius(np.diag([2.0, -1.0]), tol=1e-10).optimum
    worst_oracle = worst_forms = 0.0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
        r = numerical_radius(a).optimum
        worst_oracle = max(worst_oracle, abs(r - oracles.numrad_dense(a)))
        worst_forms = max(worst_forms, abs(r - numerical_radius(a, form="spec_radius").optimum))
    ok = (abs(jordan - 0.5) <= 1e-10 and abs(herm - 2) <= 1e-10
          and worst_oracle <= 1e-6 and worst_forms <= 1e-8)
    record(8, ok, f"jordan {jordan!r}; diag {herm!r}; oracle diff {worst_oracle:.1e}; "
                  f"forms diff {worst_forms:.1e}")


def test_criterion_09_passivity():
    t0 = time.perf_counter()
    one = np.ones((1, 1))
    s = LtiSystem(-one, one, one, one)
    xi = passivity_margin(s).optimum
    dt = time.perf_counter() - t0
    oracle = oracles.passivity_xi_grid(s)
    below = passivity_gamma(s, xi - 1e-5).optimum
    above = passivity_gamma(s, xi + 1e-5).optimum
    ok = abs(xi - oracle) <= 1e-4 and below > 0 > above and dt < 30
    record(9, ok, f"Xi {xi:.8f} vs grid {oracle:.8f}; gamma(Xi-d) {below:.2e}, "
                  f"gamma(Xi+d) {above:.2e}; {dt:.2f}s")


def test_criterion_10_invariant_identities():
    rng = np.random.default_rng(10)
    worst_rho = worst_gram = worst_inv = 0.0
    for seed in range(10):
        H = random_family(seed, 6, 3)
        G = random_family(seed, 4, 2, kind="general", m=7)
        for t in rng.uniform(-2, 2, 20):
            lmax = eval_extremal(ExtremalFunction(H, "lambda_max"), t)
            lmin = eval_extremal(ExtremalFunction(H, "lambda_min"), t)
            rho = eval_extremal(ExtremalFunction(H, "spec_radius"), t)
            worst_rho = max(worst_rho, abs(rho - max(lmax, -lmin)))
            smax = eval_extremal(ExtremalFunction(G, "sigma_max"), t)
            direct = np.linalg.svd(G(t), compute_uv=False)[0]
            worst_gram = max(worst_gram, abs(smax - direct) / direct)
            rin = eval_extremal(ExtremalFunction(H, "inner_spec_radius"), t)
            inv = np.linalg.inv(H(t))
            rho_inv = np.max(np.abs(np.linalg.eigvalsh((inv + inv.conj().T) / 2)))
            worst_inv = max(worst_inv, abs(rin * rho_inv - 1))
    ok = worst_rho == 0 and worst_gram <= 1e-10 and worst_inv <= 1e-8
    record(10, ok, f"rho identity {worst_rho:.1e}; gram vs svd {worst_gram:.1e}; "
                   f"inner radius product {worst_inv:.1e}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
