import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctrlmatch import (
    ConvergenceError,
    DegreeDist,
    GenFunc,
    InputError,
    eval_mgf,
    greedy_asymptotic,
    greedy_pmf_directed_er,
    predict_controllers,
    solve_fixed_point,
    solve_poisson_ks,
)

# reference values frozen from 50-digit mpmath root solves of
# gamma = lam*exp(-lam*e^-gamma) (smallest root) during test authoring
K1 = 0.45593809267640419   # unmatched fraction at Poisson(1)
K2 = 0.21607357304576392   # at Poisson(2)
GREEDY_FRAC_1 = 0.51011987435525002   # 1 - log(2 - e^-1)
GREEDY_FRAC_LN2 = 0.41503749927884382  # 1 - log(1.5)/log(2)


def k_reference(lam):
    """Independent oracle: brentq directly on the defining equation."""
    from scipy.optimize import brentq
    g = lambda x: x - lam * math.exp(-lam * math.exp(-x))
    xs = np.linspace(0.0, max(lam, 1.0), 20_000)
    vs = np.array([g(v) for v in xs])
    i = int(np.nonzero((vs[:-1] < 0) & (vs[1:] >= 0))[0][0])
    gs = brentq(g, xs[i], xs[i + 1], xtol=1e-15)
    gh = lam * math.exp(-gs)
    return (gs + gh + gs * gh) / lam - 1.0


def test_eval_mgf_point_mass():
    gf = GenFunc(DegreeDist.point_mass(1))
    P, ph = eval_mgf(gf, 0.7)
    assert P == pytest.approx(0.7, abs=1e-15)
    assert ph == pytest.approx(1.0, abs=1e-15)


def test_eval_mgf_poisson():
    gf = GenFunc.poisson(2.0)
    for u in (0.0, 0.3, 0.5, 1.0):
        P, ph = eval_mgf(gf, u)
        assert P == pytest.approx(math.exp(2.0 * (u - 1.0)), abs=1e-13)
        assert ph == pytest.approx(math.exp(2.0 * (u - 1.0)), abs=1e-13)
    assert eval_mgf(gf, 0.5)[0] == pytest.approx(math.exp(-1.0), abs=1e-13)


def test_eval_mgf_domain():
    gf = GenFunc.poisson(1.0)
    with pytest.raises(InputError):
        eval_mgf(gf, 1.5)
    zero = GenFunc(DegreeDist.point_mass(0))
    with pytest.raises(InputError):
        zero.phi(0.5)


def test_genfunc_normalization_and_monotonicity():
    for dist in (DegreeDist.poisson(0.5), DegreeDist.poisson(4.0),
                 DegreeDist.empirical([0.1, 0.2, 0.3, 0.4])):
        gf = GenFunc(dist)
        assert gf.Phi(1.0) == pytest.approx(1.0, abs=1e-12)
        assert gf.phi(1.0) == pytest.approx(1.0, abs=1e-12)
        us = np.linspace(0, 1, 21)
        vals_P = [gf.Phi(u) for u in us]
        vals_p = [gf.phi(u) for u in us]
        assert all(b >= a - 1e-15 for a, b in zip(vals_P, vals_P[1:]))
        assert all(b >= a - 1e-15 for a, b in zip(vals_p, vals_p[1:]))
        # convexity on [0,1)
        second = np.diff(vals_P, 2)
        assert np.all(second >= -1e-12)


def test_fixed_point_point_mass_degenerate():
    # all-degree-one: perfect matching exists, U* = 0 (the pair-A least
    # fixed point sits at the boundary w3 = 1 because phi is constant 1)
    gf = GenFunc(DegreeDist.point_mass(1))
    sol = solve_fixed_point(gf, gf)
    assert sol.u_star == pytest.approx(0.0, abs=1e-12)
    assert sol.residual <= 1e-12


def test_fixed_point_poisson_identity():
    for lam in (0.5, 1.0, 2.0, math.e, 4.0, 8.0):
        gf = GenFunc.poisson(lam)
        sol = solve_fixed_point(gf, gf)
        ks = solve_poisson_ks(lam)
        assert abs(sol.u_star - ks.k_lambda) <= 1e-8, lam
        assert sol.residual <= 1e-10
        # symmetric input: the two decoupled pairs coincide
        w1, w2, w3, w4 = sol.w
        assert abs(w1 - w3) <= 1e-9 and abs(w2 - w4) <= 1e-9


def test_fixed_point_frozen_values():
    assert solve_fixed_point(GenFunc.poisson(1.0), GenFunc.poisson(1.0)).u_star \
        == pytest.approx(K1, abs=1e-10)
    assert solve_fixed_point(GenFunc.poisson(2.0), GenFunc.poisson(2.0)).u_star \
        == pytest.approx(K2, abs=1e-10)
    # lam = e: U* = 3/e - 1 analytically (gamma = 1)
    sol = solve_fixed_point(GenFunc.poisson(math.e), GenFunc.poisson(math.e))
    assert sol.u_star == pytest.approx(3.0 / math.e - 1.0, abs=1e-8)


def test_fixed_point_mean_mismatch_rejected():
    with pytest.raises(InputError):
        solve_fixed_point(GenFunc.poisson(1.0), GenFunc.poisson(2.0))
    with pytest.raises(InputError):
        solve_fixed_point(GenFunc(DegreeDist.point_mass(0)),
                          GenFunc(DegreeDist.point_mass(0)))


def test_poisson_ks_closed_forms():
    ks = solve_poisson_ks(math.e)
    assert ks.gamma_star_lo == pytest.approx(1.0, abs=1e-9)
    assert ks.gamma_star_hi == ks.gamma_star_lo
    assert abs(ks.k_lambda - (3.0 / math.e - 1.0)) <= 1e-12
    assert ks.h_lambda == 0.0
    for lam in (0.5, 1.0, 2.0, 2.5):
        assert solve_poisson_ks(lam).h_lambda == 0.0
    for lam in (3.0, 4.0, 10.0):
        ks = solve_poisson_ks(lam)
        assert ks.h_lambda > 0.0
        # root residual
        g = ks.gamma_star_lo - lam * math.exp(-lam * math.exp(-ks.gamma_star_lo))
        assert abs(g) <= 1e-12
        assert ks.gamma_star_hi == pytest.approx(
            lam * math.exp(-ks.gamma_star_lo), abs=1e-12)
    with pytest.raises(InputError):
        solve_poisson_ks(0.0)
    with pytest.raises(InputError):
        solve_poisson_ks(-1.0)


def test_poisson_ks_k1_omega():
    # at lam=1 the root solves gamma = exp(-e^-gamma)
    ks = solve_poisson_ks(1.0)
    assert ks.k_lambda == pytest.approx(K1, abs=1e-12)


def test_poisson_ks_matches_independent_root_solver():
    for lam in (0.5, 1.0, 2.0, 3.5, 4.0, 10.0):
        assert solve_poisson_ks(lam).k_lambda == pytest.approx(
            k_reference(lam), abs=1e-11), lam


def test_greedy_pmf_small_cases():
    pmf = greedy_pmf_directed_er(1, 0.3)
    assert pmf[0] == pytest.approx(0.3, abs=1e-15)
    assert pmf[1] == pytest.approx(0.7, abs=1e-15)
    assert greedy_pmf_directed_er(5, 0.0).tolist() == [0, 0, 0, 0, 0, 1]
    assert greedy_pmf_directed_er(5, 1.0).tolist() == [1, 0, 0, 0, 0, 0]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 400),
       st.floats(1e-8, 1.0, exclude_min=False))
def test_greedy_pmf_normalized(n, p):
    pmf = greedy_pmf_directed_er(n, p)
    assert abs(pmf.sum() - 1.0) <= 1e-10
    assert np.all(pmf >= 0)


def test_greedy_pmf_argmax_matches_asymptotics():
    for lam in (1.0, 2.0):
        n = 1000
        am = int(np.argmax(greedy_pmf_directed_er(n, lam / n)))
        target = math.log(2.0 - math.exp(-lam)) / lam
        assert abs(am / n - target) <= 0.01


def test_greedy_asymptotic_values():
    f, mean_c, var_c = greedy_asymptotic(1.0)
    assert f == pytest.approx(GREEDY_FRAC_1, abs=1e-14)
    assert mean_c == pytest.approx(f, abs=1e-15)
    assert var_c == pytest.approx(0.25, abs=1e-15)
    assert greedy_asymptotic(math.log(2.0))[0] == pytest.approx(
        GREEDY_FRAC_LN2, abs=1e-14)
    assert greedy_asymptotic(0.0)[0] == 0.0
    assert greedy_asymptotic(math.inf)[0] == 1.0
    with pytest.raises(InputError):
        greedy_asymptotic(-0.5)
    # lam -> 0+: matched fraction -> 0 continuously
    assert greedy_asymptotic(1e-8)[0] < 1e-6


def test_predict_controllers():
    gf = GenFunc(DegreeDist.point_mass(1))
    assert predict_controllers(gf, gf, 1000) == 1
    gfp = GenFunc.poisson(1.0)
    assert predict_controllers(gfp, gfp, 100_000) == 45594


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8))
def test_fixed_point_empirical_dists(weights):
    pmf = np.asarray(weights) / np.sum(weights)
    gf = GenFunc(DegreeDist.empirical(pmf))
    if gf.mu == 0:
        return
    sol = solve_fixed_point(gf, gf)
    assert 0.0 <= sol.u_star <= 1.0
    assert sol.residual <= 1e-10
    assert all(0.0 <= w <= 1.0 for w in sol.w)
