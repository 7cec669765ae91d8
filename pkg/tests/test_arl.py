"""Analytic run-length approximations: frozen oracles and identities."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ndtr, zeta as riemann_zeta

from transient_cpd import arl
from transient_cpd.exceptions import (
    ApproximationWarning,
    ConfigurationError,
    DegenerateApproximationError,
)
from transient_cpd.model import TransientWindow


# -- constants ---------------------------------------------------------------


def test_rho_equals_zeta_half_closed_form():
    # rho = -zeta(1/2) / sqrt(2 pi), an independent closed form
    assert arl.RHO == pytest.approx(-riemann_zeta(0.5) / math.sqrt(2 * math.pi), abs=1e-12)


def test_rho_quadrature_matches_constant():
    assert arl.rho("quadrature") == pytest.approx(arl.RHO, abs=1e-10)
    assert arl.rho() == arl.RHO
    with pytest.raises(ConfigurationError):
        arl.rho("series")


def _kappa_loop(A):
    # plain loop with erfc, independent of the vectorized block summation
    s, k = 0.0, 1
    while True:
        t = 0.5 * math.erfc(A * math.sqrt(k) / 2 / math.sqrt(2)) / k
        s += t
        if t < 1e-18:
            break
        k += 1
    return 2 / A**2 * math.exp(-2 * s)


@pytest.mark.parametrize("A", [0.25, 0.5, 1.0, 2.0, 4.0])
def test_kappa_matches_loop_oracle(A):
    assert arl.kappa(A) == pytest.approx(_kappa_loop(A), rel=1e-11)


def test_kappa_frozen_value():
    assert arl.kappa(1.0) == pytest.approx(0.56037022843, abs=1e-10)


@pytest.mark.parametrize("A", [0.25, 0.5, 1.0, 2.0, 4.0])
def test_zeta_equals_kappa(A):
    assert arl.zeta_gaussian(A) == pytest.approx(arl.kappa(A), abs=1e-10)


def test_kappa_proxy_is_close_for_moderate_shifts():
    for A in [0.25, 0.5, 1.0, 1.5]:
        assert abs(arl.kappa_proxy(A) - arl.kappa(A)) < 0.01


@settings(max_examples=40)
@given(st.floats(0.05, 6.0))
def test_kappa_in_unit_interval_and_decreasing(A):
    k1, k2 = arl.kappa(A), arl.kappa(A * 1.1)
    assert 0 < k2 < k1 < 1


# -- CUSUM and SR --------------------------------------------------------------


def test_general_cusum_formula_components():
    z = arl.zeta_gaussian(1.0)
    H = 4.39
    ref = math.exp(H) / (0.5 * z * z) - H / 0.5 - 1 / (0.5 * z)
    assert arl.cusum_arl_general(H, 1.0) == pytest.approx(ref)
    assert arl.cusum_arl_general(H, 1.0) == pytest.approx(501.26, abs=0.01)


def test_cusum_fast_table_values():
    exact = [arl.cusum_arl_fast(H, 1.0) for H in (9.32, 17.33, 80.65, 159.35, 788.0)]
    assert [round(v) for v in exact] == [59, 110, 514, 1015, 5019]
    proxy = [arl.cusum_arl_fast(H, 1.0, proxy=True) for H in (9.32, 17.33, 80.65, 159.35, 788.0)]
    assert [round(v) for v in proxy] == [60, 111, 518, 1023, 5058]


@settings(max_examples=40)
@given(st.floats(1.0, 1e5), st.floats(0.1, 3.0))
def test_fast_thresholds_invert(target, A):
    assert arl.cusum_arl_fast(arl.cusum_threshold_fast(target, A), A) == pytest.approx(target)
    assert arl.sr_arl_fast(arl.sr_threshold_fast(target, A), A) == pytest.approx(target)


def test_fast_arls_are_linear_in_threshold():
    assert arl.cusum_arl_fast(200.0, 0.7) == pytest.approx(2 * arl.cusum_arl_fast(100.0, 0.7))
    assert arl.sr_arl_fast(200.0, 0.7) == pytest.approx(2 * arl.sr_arl_fast(100.0, 0.7))


# -- MOSUM --------------------------------------------------------------------


def test_slepian_closed_form_at_zero():
    # Phi(0)^2 - phi(0)^2 = 1/4 - 1/(2 pi)
    assert arl.slepian_F1(0.0) == pytest.approx(0.25 - 1 / (2 * math.pi), abs=1e-14)
    assert arl.slepian_F1(0.0) == pytest.approx(0.0908450569, abs=1e-10)


@pytest.mark.parametrize("h", [1.0, 2.0, 3.0, 4.0])
def test_geometric_F_exact_at_one_and_two(h):
    assert arl.geometric_F(h, 1) == arl.slepian_F1(h)
    assert arl.geometric_F(h, 2) == arl.shepp_F2(h)


@settings(max_examples=60)
@given(st.floats(0.0, 5.0))
def test_two_window_bounds(h):
    f1, f2 = arl.slepian_F1(h), arl.shepp_F2(h)
    # stationarity gives F(2) <= F(1); nonnegative correlation gives F(2) >= F(1)^2
    assert f2 <= f1 + 1e-12
    assert f2 >= f1 * f1 - 1e-9
    assert 0 < arl.theta(h) < 1


@settings(max_examples=40)
@given(st.floats(0.5, 4.5), st.floats(0.01, 0.5))
def test_probabilities_increase_with_barrier(h, dh):
    assert arl.slepian_F1(h + dh) >= arl.slepian_F1(h)
    assert arl.shepp_F2(h + dh) >= arl.shepp_F2(h) - 1e-12


def test_corrections_vanish_for_long_windows():
    for h in (2.0, 3.0):
        assert arl.corrected_F_L(h, 10**9) == pytest.approx(arl.slepian_F1(h), abs=1e-4)
        assert arl.corrected_F_2L(h, 10**9) == pytest.approx(arl.shepp_F2(h), abs=1e-4)


@pytest.mark.parametrize("L", [10, 50])
@pytest.mark.parametrize("h", [2.0, 3.0])
def test_corrected_probabilities_match_discrete_simulation(L, h):
    rng = np.random.default_rng(0)
    reps = 40_000
    y = rng.standard_normal((reps, 3 * L))
    c = np.concatenate([np.zeros((reps, 1)), np.cumsum(y, axis=1)], axis=1)
    xi = (c[:, L:] - c[:, :-L]) / math.sqrt(L)
    p_l = (xi[:, : L + 1] < h).all(axis=1).mean()
    p_2l = (xi[:, : 2 * L + 1] < h).all(axis=1).mean()
    assert arl.corrected_F_L(h, L) == pytest.approx(p_l, abs=0.006)
    assert arl.corrected_F_2L(h, L) == pytest.approx(p_2l, abs=0.006)


def test_omega():
    assert arl.omega(2) == pytest.approx(arl.RHO)
    assert arl.omega(50, rho=0.583) == pytest.approx(math.sqrt(2) * 0.583 / math.sqrt(50))


def test_mosum_table_values_with_rounded_rho():
    hs = (2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5)
    ten = [arl.mosum_arl_standardized(h, 10, rho=arl.RHO_PROXY) for h in hs]
    np.testing.assert_allclose(ten, [126.0, 217.4, 394.9, 759.1, 1550.7, 3374.9, 7837.5], atol=0.1)
    fifty = [arl.mosum_arl_standardized(h, 50, rho=arl.RHO_PROXY) for h in hs]
    np.testing.assert_allclose(fifty, [471.2, 790.7, 1392.2, 2587.3, 5099.5, 10695.5, 23920.6], atol=0.1)


def test_mosum_raw_threshold_scaling():
    h, L, mu, sigma = 2.7, 20, 1.5, 2.0
    H = mu * L + h * sigma * math.sqrt(L)
    assert arl.mosum_arl(H, L, mu, sigma) == pytest.approx(arl.mosum_arl_standardized(h, L))


@pytest.mark.parametrize("L", [5, 10, 50])
def test_mosum_threshold_inverts(L):
    h = arl.mosum_threshold_for_arl(500.0, L)
    assert arl.mosum_arl_standardized(h, L) == pytest.approx(500.0, rel=1e-9)
    assert arl.mosum_threshold_for_arl(490.0, 10) == pytest.approx(2.5852, abs=1e-4)


def test_mosum_threshold_out_of_bracket():
    with pytest.raises(DegenerateApproximationError):
        arl.mosum_threshold_for_arl(1e30, 10, bracket=(0.0, 3.0))


@settings(max_examples=30)
@given(st.floats(1.5, 4.0), st.integers(2, 200))
def test_mosum_arl_increases_with_threshold(h, L):
    assert arl.mosum_arl_standardized(h + 0.05, L) > arl.mosum_arl_standardized(h, L)


def test_mosum_bcp_reproduces_base_points():
    assert arl.mosum_bcp(2.5, 10, 10) == arl.corrected_F_L(2.5, 10)
    assert arl.mosum_bcp(2.5, 10, 20) == arl.corrected_F_2L(2.5, 10)
    assert arl.mosum_bcp(2.5, 10, 100) < arl.mosum_bcp(2.5, 10, 50)


def test_mosum_requires_window_of_two():
    with pytest.raises(ConfigurationError):
        arl.corrected_F_L(2.0, 1)


def test_low_threshold_is_degenerate():
    with pytest.raises(DegenerateApproximationError):
        arl.mosum_arl_standardized(-40.0, 10)


# -- generalized MOSUM --------------------------------------------------------


def test_genmosum_arl_formula():
    w = TransientWindow(25, 50)
    f1, f2 = 0.9, 0.8
    th = f2 / f1
    assert arl.genmosum_arl(-3.0, w, f1, f2) == pytest.approx(-50 * f2 / (th**2 * math.log(th)))
    assert arl.genmosum_bcp(-3.0, w, 100, f1, f2) == pytest.approx(f2)
    assert arl.genmosum_bcp(-3.0, w, 50, f1, f2) == pytest.approx(f1)


def test_genmosum_base_order_checked():
    with pytest.raises(ConfigurationError):
        arl.genmosum_arl(0.0, TransientWindow(1, 5), 0.5, 0.6)
    with pytest.raises(ConfigurationError):
        arl.genmosum_arl(0.0, TransientWindow(1, 5), 1.0, 0.6)


def test_hogan_tail_frozen_and_clamped():
    assert arl.hogan_tail(5.0, 1.0, 10.0) == pytest.approx(5.902e-4, rel=1e-3)
    with pytest.warns(ApproximationWarning):
        assert arl.hogan_tail(0.01, 1.0, 0.001) == 1.0


def test_explicit_approximation_values():
    hs = (2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5)
    vals = [arl.approx2_arl(h, 1.0, 10) for h in hs]
    np.testing.assert_allclose(vals, [20.4, 32.8, 49.7, 71.8, 100.6, 137.6, 185.2], atol=0.1)


def test_explicit_bcp_is_monotone_in_horizon():
    assert arl.approx1_bcp(3.0, 1.0, 10, 50) < arl.approx1_bcp(3.0, 1.0, 10, 20)


def test_explicit_approximation_warns_for_small_thresholds():
    with warnings.catch_warnings():
        warnings.simplefilter("error", ApproximationWarning)
        arl.approx2_arl(3.0, 1.0, 10)
    with pytest.raises((DegenerateApproximationError, ApproximationWarning)):
        with warnings.catch_warnings():
            warnings.simplefilter("error", ApproximationWarning)
            arl.approx2_arl(-2.0, 1.0, 10)


def test_invalid_inputs():
    with pytest.raises(ConfigurationError):
        arl.kappa(0.0)
    with pytest.raises(ConfigurationError):
        arl.cusum_arl_fast(-1.0, 1.0)
    with pytest.raises(ConfigurationError):
        arl.slepian_F1(float("nan"))
