"""Analytic approximations to average run lengths and boundary-crossing
probabilities in the Gaussian model.

Conventions
-----------
* CUSUM thresholds are on the ratio scale ``H`` (statistic ``V_n``) except in
  :func:`cusum_arl_general`, which uses Page's log scale.
* MOSUM thresholds ``h`` are standardized: ``h = (H - mu L) / (sigma sqrt(L))``.
* Run lengths of the moving-sum rules exclude the warm-up window, i.e. they
  approximate ``E tau_S``; add ``L`` (or ``l1``) for the stopping time in
  observations.
* ``rho`` arguments default to the exact overshoot constant :data:`RHO`.
  :data:`RHO_PROXY` is the three-digit working value used for the fast
  ``kappa(A) ~ exp(-rho A)`` proxy.
"""

import math
import warnings

import numpy as np
from scipy.special import ndtr

from . import _quadrature
from ._validation import check_positive, check_probability, check_real
from .exceptions import (
    ApproximationWarning,
    ConfigurationError,
    ConvergenceError,
    DegenerateApproximationError,
)

#: Expected limiting overshoot of a unit-variance Gaussian random walk.
RHO = 0.5825971579389904
#: Rounded value used with the ``exp(-rho A)`` proxy for ``kappa``.
RHO_PROXY = 0.583

_SQRT_PI = math.sqrt(math.pi)
_SERIES_TOL = 1e-16
_SERIES_CAP = 10**6


def _phi(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _Phi(x):
    return float(ndtr(x))


def rho(method="constant"):
    """Overshoot constant ``rho``.

    Parameters
    ----------
    method : {"constant", "quadrature"}
        Return the stored value or evaluate
        ``-int_0^inf 1/(pi l^2) log(2 (1 - exp(-l^2/2)) / l^2) dl``.
    """
    if method == "constant":
        return RHO
    if method != "quadrature":
        raise ConfigurationError(f"unknown method {method!r}")

    def f(lam):
        return -math.log(2.0 * -math.expm1(-0.5 * lam * lam) / (lam * lam)) / (
            math.pi * lam * lam
        )

    return _quadrature.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13) + _quadrature.quad(
        f, 1.0, np.inf, epsabs=1e-13, epsrel=1e-13
    )


def _series(term_fn):
    """Sum ``term_fn(k)`` over k = 1, 2, ... for positive, eventually
    geometrically decaying terms.

    Stops once the geometric bound on the remaining tail, from the ratio of
    the last two terms, falls below ``_SERIES_TOL``.
    """
    total = 0.0
    start = 1
    block = 256
    while start <= _SERIES_CAP:
        k = np.arange(start, min(start + block, _SERIES_CAP + 1), dtype=float)
        terms = term_fn(k)
        total += float(terms.sum())
        last = float(terms[-1])
        prev = float(terms[-2]) if terms.size > 1 else last
        ratio = last / prev if prev > 0 else 0.0
        if last == 0.0 or (ratio < 1.0 and last * ratio / (1.0 - ratio) < _SERIES_TOL):
            return total
        start += block
        block *= 2
    raise ConvergenceError(f"series tail did not fall below {_SERIES_TOL:g} within 10^6 terms")


def kappa(A):
    """``kappa(A) = 2/A^2 exp(-2 sum_k Phi(-A sqrt(k)/2) / k)``."""
    A = check_positive(A, "A")
    s = _series(lambda k: ndtr(-0.5 * A * np.sqrt(k)) / k)
    return 2.0 / (A * A) * math.exp(-2.0 * s)


def kappa_proxy(A, rho=RHO_PROXY):
    """Fast proxy ``kappa(A) ~ exp(-rho A)``."""
    A = check_positive(A, "A")
    return math.exp(-rho * A)


def zeta(prob_inf_positive, prob_zero_nonpositive, info_g):
    """Limiting exponential overshoot for a general pair ``(f, g)``.

    Parameters
    ----------
    prob_inf_positive, prob_zero_nonpositive : callable
        ``k -> Pr_inf(Z_k > 0)`` and ``k -> Pr_0(Z_k <= 0)`` for the
        log-likelihood random walk ``Z_k``, vectorized over integer ``k``.
    info_g : float
        Kullback-Leibler information of ``g`` relative to ``f``.
    """
    s = _series(lambda k: (prob_inf_positive(k) + prob_zero_nonpositive(k)) / k)
    return math.exp(-s) / info_g


def zeta_gaussian(A):
    """``zeta`` for the Gaussian mean-shift pair.

    Under the null the walk ``Z_k`` is ``N(-k A^2/2, k A^2)`` and under the
    alternative ``N(k A^2/2, k A^2)``.
    """
    A = check_positive(A, "A")
    return zeta(
        lambda k: ndtr((-0.5 * k * A * A) / (A * np.sqrt(k))),
        lambda k: ndtr((0.0 - 0.5 * k * A * A) / (A * np.sqrt(k))),
        0.5 * A * A,
    )


def cusum_arl_general(H_log, A, zeta_value=None):
    """``e^H/(I_g zeta^2) - H/I_f - 1/(I_g zeta)`` for Page's chart.

    ``H_log`` is the threshold on the log scale. For the Gaussian pair
    ``I_f = I_g = A^2/2``. The expansion is meant for large ``H_log``;
    for negative thresholds the ``-H/I_f`` term dominates and the value is
    not a run length.
    """
    H_log = check_real(H_log, "H_log")
    A = check_positive(A, "A")
    z = zeta_gaussian(A) if zeta_value is None else zeta_value
    info = 0.5 * A * A
    return math.exp(H_log) / (info * z * z) - H_log / info - 1.0 / (info * z)


def cusum_arl_fast(H, A, proxy=False, rho=RHO_PROXY):
    """``2H / (A kappa(A)^2)``, ARL of ``V_n`` at ratio-scale threshold ``H``."""
    H = check_positive(H, "H")
    k = kappa_proxy(A, rho) if proxy else kappa(A)
    return 2.0 * H / (A * k * k)


def sr_arl_fast(H, A, proxy=False, rho=RHO_PROXY):
    """``H / kappa(A)``, ARL of the Shiryaev-Roberts rule at threshold ``H``."""
    H = check_positive(H, "H")
    k = kappa_proxy(A, rho) if proxy else kappa(A)
    return H / k


def cusum_threshold_fast(target_arl, A, proxy=False, rho=RHO_PROXY):
    """Invert :func:`cusum_arl_fast` for the ratio-scale threshold."""
    target_arl = check_positive(target_arl, "target_arl")
    k = kappa_proxy(A, rho) if proxy else kappa(A)
    return target_arl * A * k * k / 2.0


def sr_threshold_fast(target_arl, A, proxy=False, rho=RHO_PROXY):
    """Invert :func:`sr_arl_fast`."""
    target_arl = check_positive(target_arl, "target_arl")
    return target_arl * (kappa_proxy(A, rho) if proxy else kappa(A))


# -- MOSUM: continuous-time probabilities and discrete corrections ---------


def slepian_F1(h):
    """``F_h(1) = Phi(h)^2 - phi(h) (h Phi(h) + phi(h))``.

    Probability that the standardized moving sum, viewed as a continuous
    process with triangular correlation, stays below ``h`` over a unit
    interval.
    """
    h = check_real(h, "h")
    P, p = _Phi(h), _phi(h)
    return min(max(P * P - p * (h * P + p), 0.0), 1.0)


def _two_window(h, hl):
    """Probability over two windows with inner barrier ``h`` and outer ``hl``.

    With ``hl = h`` this is the continuous-time ``F_h(2)``; with
    ``hl = h + omega_L`` it is the discrete-corrected ``F_h(2L; L)``.
    """
    P, p = _Phi(h), _phi(h)
    Pl, pl = _Phi(hl), _phi(hl)
    closed = (
        0.5 * pl * pl * ((h * h - 1.0 + _SQRT_PI * h) * P + (h + _SQRT_PI) * p)
        - pl * Pl * ((h + hl) * P + p)
        + P * Pl * Pl
    )
    c = _SQRT_PI * pl * pl

    def g(y):
        return _Phi(h - y) * (_phi(hl + y) * _Phi(hl - y) - c * _Phi(math.sqrt(2.0) * y))

    # Phi(h - y) < 1e-14 beyond y = h + 8, which bounds the integrand.
    upper = max(h, 0.0) + _quadrature.TAIL_SD
    integral = _quadrature.quad(g, 0.0, upper, epsabs=1e-13, epsrel=1e-12)
    return min(max(closed + integral, 0.0), 1.0)


def shepp_F2(h):
    """``F_h(2)``: closed terms plus a one-dimensional integral."""
    h = check_real(h, "h")
    return _two_window(h, h)


def theta(h):
    """``theta(h) = F_h(2) / F_h(1)``."""
    f1 = slepian_F1(h)
    if f1 <= 0.0:
        raise DegenerateApproximationError(f"F_h(1) vanishes at h={h}")
    return shepp_F2(h) / f1


def geometric_F(h, T):
    """``F_h(T) ~ F_h(2) theta(h)^(T - 2)``; exact at ``T = 1`` and ``T = 2``."""
    T = check_positive(T, "T")
    if T == 1:
        return slepian_F1(h)
    if T == 2:
        return shepp_F2(h)
    f2 = shepp_F2(h)
    return f2 * theta(h) ** (T - 2)


def omega(L, rho=None):
    """Barrier shift ``omega_L = sqrt(2) rho / sqrt(L)``."""
    check_positive(L, "L")
    return math.sqrt(2.0) * (RHO if rho is None else rho) / math.sqrt(L)


def _check_window(L):
    check_positive(L, "L", integer=True)
    if L < 2:
        raise ConfigurationError(f"discrete corrections need L >= 2; got L={L}")
    return L


def corrected_F_L(h, L, rho=None):
    """``F_h(L; L) ~ Phi(h) Phi(h_L) - phi(h_L) (h Phi(h) + phi(h))``."""
    h = check_real(h, "h")
    _check_window(L)
    hl = h + omega(L, rho)
    P, p = _Phi(h), _phi(h)
    return min(max(P * _Phi(hl) - _phi(hl) * (h * P + p), 0.0), 1.0)


def corrected_F_2L(h, L, rho=None):
    """Discrete-corrected ``F_h(2L; L)`` (one quadrature)."""
    h = check_real(h, "h")
    _check_window(L)
    return _two_window(h, h + omega(L, rho))


def theta_L(h, L, rho=None):
    """``theta_L(h) = F_h(2L; L) / F_h(L; L)``."""
    fl = corrected_F_L(h, L, rho)
    if fl <= 0.0:
        raise DegenerateApproximationError(f"F_h(L; L) vanishes at h={h}, L={L}")
    return corrected_F_2L(h, L, rho) / fl


def _geometric_arl(window, f2, th):
    if not 0.0 < th < 1.0:
        raise DegenerateApproximationError(
            f"theta={th:.6g} is outside (0, 1); the threshold is too low for the "
            "geometric approximation"
        )
    return -window * f2 / (th * th * math.log(th))


def mosum_arl_standardized(h, L, rho=None):
    """``-L F_h(2L; L) / (theta_L(h)^2 log theta_L(h))``, approximating ``E tau_S``."""
    f2 = corrected_F_2L(h, L, rho)
    fl = corrected_F_L(h, L, rho)
    if fl <= 0.0:
        raise DegenerateApproximationError(f"F_h(L; L) vanishes at h={h}, L={L}")
    return _geometric_arl(L, f2, f2 / fl)


def mosum_arl(H, L, mu=0.0, sigma=1.0, rho=None):
    """Approximate ``E tau_S`` of the MOSUM rule at raw-sum threshold ``H``.

    The standardized threshold is ``h = (H - mu L) / (sigma sqrt(L))``; add
    ``L`` to obtain the mean stopping time in observations.
    """
    H = check_real(H, "H")
    _check_window(L)
    sigma = check_positive(sigma, "sigma")
    h = (H - check_real(mu, "mu") * L) / (sigma * math.sqrt(L))
    return mosum_arl_standardized(h, L, rho)


def mosum_threshold_for_arl(target, L, rho=None, bracket=(0.0, 8.0)):
    """Standardized ``h`` with ``mosum_arl_standardized(h, L) = target``."""
    from scipy.optimize import brentq

    target = check_positive(target, "target")
    _check_window(L)

    def gap(h):
        try:
            return math.log(mosum_arl_standardized(h, L, rho)) - math.log(target)
        except DegenerateApproximationError:
            return -np.inf

    lo, hi = bracket
    grid = np.linspace(lo, hi, 33)
    vals = [gap(h) for h in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if np.isfinite(fa) and fa <= 0.0 < fb:
            return brentq(gap, a, b, xtol=1e-12)
    raise DegenerateApproximationError(
        f"no threshold in [{lo}, {hi}] gives E tau_S = {target} for L={L}"
    )


def mosum_bcp(h, L, M, rho=None):
    """``F_h(M; L) ~ F_h(2L; L) theta_L(h)^(M/L - 2)``.

    Exact reproduction of the base probabilities at ``M = L`` and ``M = 2L``.
    """
    check_positive(M, "M", strict=False)
    _check_window(L)
    if M == L:
        return corrected_F_L(h, L, rho)
    f2 = corrected_F_2L(h, L, rho)
    if M == 2 * L:
        return f2
    return min(max(f2 * theta_L(h, L, rho) ** (M / L - 2.0), 0.0), 1.0)


# -- generalized MOSUM -----------------------------------------------------


def _check_base(F_l1, F_2l1):
    check_probability(F_l1, "F_l1", open_interval=True)
    check_probability(F_2l1, "F_2l1", open_interval=True)
    if F_2l1 > F_l1:
        raise ConfigurationError(
            f"base probabilities must satisfy F_2l1 <= F_l1; got {F_2l1} > {F_l1}"
        )


def genmosum_bcp(H, window, M, F_l1, F_2l1):
    """``F(H, M) ~ F(H, 2 l1) theta^(M/l1 - 2)`` with ``theta = F(H,2l1)/F(H,l1)``.

    ``H`` identifies the threshold at which the externally estimated base
    probabilities were computed; it does not enter the formula.
    """
    check_real(H, "H")
    check_positive(M, "M", strict=False)
    _check_base(F_l1, F_2l1)
    l1 = window.l1
    if M == 2 * l1:
        return float(F_2l1)
    if M == l1:
        return float(F_l1)
    return F_2l1 * (F_2l1 / F_l1) ** (M / l1 - 2.0)


def genmosum_arl(H, window, F_l1, F_2l1):
    """``-l1 F(H, 2l1) / (theta^2 log theta)``, approximating ``E tau_S``."""
    check_real(H, "H")
    _check_base(F_l1, F_2l1)
    return _geometric_arl(window.l1, F_2l1, F_2l1 / F_l1)


def hogan_tail(u, gamma, m):
    """Large-deviation tail ``[2 gamma (m gamma - u) + 3] exp(-2 gamma u)``.

    Approximates the probability that the drifted Brownian increment
    ``W(t) - W(s) - gamma (t - s)`` exceeds ``u`` for some ``0 <= s < t <= m``.
    The value is clamped to ``[0, 1]``; an :class:`ApproximationWarning`
    is issued when ``m gamma / u`` is outside ``(1, inf)``.
    """
    u = check_real(u, "u")
    gamma = check_positive(gamma, "gamma")
    m = check_positive(m, "m")
    if u <= 0 or m * gamma / u <= 1.0:
        warnings.warn(
            f"m*gamma/u = {m * gamma / u if u else math.inf:.4g} is outside (1, inf)",
            ApproximationWarning,
            stacklevel=2,
        )
    value = (2.0 * gamma * (m * gamma - u) + 3.0) * math.exp(-2.0 * gamma * u)
    return min(max(value, 0.0), 1.0)


def _explicit_base(H, A, l1, rho):
    A = check_positive(A, "A")
    check_positive(l1, "l1", integer=True)
    H = check_real(H, "H")
    r = RHO if rho is None else rho
    e = math.exp(-A * (H + 2.0 * r))
    f1 = 1.0 - (A * (A * l1 - H - 2.0 * r) + 3.0) * e
    f2 = 1.0 - (A * (1.5 * A * l1 - H - 2.0 * r) + 3.0) * e
    if not (0.0 < f2 < 1.0 and 0.0 < f1 < 1.0):
        warnings.warn(
            f"explicit base probabilities ({f1:.4g}, {f2:.4g}) leave (0, 1) at H={H}; "
            "the approximation is unreliable for small H",
            ApproximationWarning,
            stacklevel=3,
        )
    th = f2 / f1 if f1 != 0.0 else math.nan
    if not 0.0 < th < 1.0:
        raise DegenerateApproximationError(
            f"explicit theta={th:.6g} is outside (0, 1) at H={H}; "
            "small thresholds are outside the approximation's regime"
        )
    return f1, f2, th


def approx1_bcp(H, A, l1, M, rho=None):
    """Closed-form ``F_{1,l1}(H, M)`` from the discrete-corrected large-deviation tail."""
    check_positive(M, "M", strict=False)
    _, f2, th = _explicit_base(H, A, l1, rho)
    return min(max(f2 * th ** (M / l1 - 2.0), 0.0), 1.0)


def approx2_arl(H, A, l1, rho=None):
    """Closed-form ``E tau_{S,1,l1}(H)`` (no simulation)."""
    _, f2, th = _explicit_base(H, A, l1, rho)
    return _geometric_arl(l1, f2, th)
