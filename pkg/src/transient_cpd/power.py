"""Detection power of the MOSUM rule when the signal length equals the window.

The power is the probability that the moving sum crosses its threshold while
any part of the signal is inside the window, given no crossing before the
window first touches the signal. It is approximated by a continuous-time
boundary-crossing probability for a Gaussian process with triangular
correlation, optionally corrected for discrete time by raising the barrier
by ``omega_L = sqrt(2) rho / sqrt(L)``.

Only ``lambda = l / L = 1`` has formulas here; other ratios raise
:class:`~transient_cpd.exceptions.UnsupportedCaseError`.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcx, ndtr

from . import _quadrature
from ._rng import noise_block
from ._validation import check_positive, check_real
from .arl import omega
from .exceptions import (
    ConfigurationError,
    QuadratureError,
    SimulationError,
    UnsupportedCaseError,
)

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BarrierProfile:
    """Barrier ``B(t; h, 0, -gamma, gamma)`` on ``[0, 3]``.

    Flat at ``h`` on ``[0, 1]``, falls linearly to ``h - gamma`` at ``t = 2``
    and climbs back to ``h`` at ``t = 3``.
    """

    h: float
    gamma: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(
            t <= 1.0,
            self.h,
            np.where(t <= 2.0, self.h - self.gamma * (t - 1.0), self.h - self.gamma + self.gamma * (t - 2.0)),
        )
        out = np.where((t < 0.0) | (t > 3.0), 0.0, out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class PowerEstimate:
    """Monte Carlo estimate of a conditional detection probability.

    Attributes
    ----------
    probability, std_error : float
    nu : int
        Last pre-change observation; the signal occupies ``nu+1 .. nu+l``.
    nu_prime : int
        End of the conditioning period, on the index scale of the statistic.
    horizon : int
        Length of the detection window.
    replicates : int
        Simulated streams.
    conditioned : int
        Streams without an alarm during the conditioning period.
    seed : int
    """

    probability: float
    std_error: float
    nu: int
    nu_prime: int
    horizon: int
    replicates: int
    conditioned: int
    seed: int

    def to_dict(self):
        return dict(self.__dict__)


def _require_unit_ratio(l, L):
    if l is not None and l != L:
        raise UnsupportedCaseError(
            f"power formulas are available only for l = L (got l={l}, L={L}); "
            "other length ratios need separate boundary-crossing results"
        )


def mean_profile_discrete(n, A, L, l, nu_prime):
    """Mean shift ``Q(n; A, L, nu')`` of the moving sum ``S_{n,L}``.

    ``S_{n,L}`` sums observations ``n+1 .. n+L``; with the signal on
    ``nu+1 .. nu+l`` and ``nu' = nu - L`` the shift ramps up from ``nu'``,
    holds at ``A min(l, L)`` and ramps down to zero at ``nu + l``.
    """
    n = int(n)
    check_positive(L, "L", integer=True)
    check_positive(l, "l", integer=True)
    lo, hi = min(l, L), max(l, L)
    nu = nu_prime + L
    if n <= nu_prime or n >= nu + l:
        return 0.0
    if n <= nu_prime + lo:
        return A * (n - nu_prime)
    if n <= nu_prime + hi:
        return A * lo
    return A * (lo - (n - nu_prime - hi))


def F_h0_1(h, x=0.0):
    """``F_{h,0}(1 | x) = Phi(h) - exp(-(h^2 - x^2)/2) Phi(x)`` for ``x <= h``.

    Probability that the continuous-time standardized moving sum started at
    ``x`` stays below ``h`` on ``[0, 1]``.
    """
    h = check_real(h, "h")
    x = np.asarray(x, dtype=float)
    if np.any(x > h):
        raise ConfigurationError("F_h0_1 needs x <= h")
    # exp(x^2/2) Phi(x) = erfcx(-x/sqrt(2))/2 avoids overflow for very negative x
    out = ndtr(h) - 0.5 * math.exp(-0.5 * h * h) * erfcx(-x / math.sqrt(2.0))
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def _phi(z):
    return np.exp(-0.5 * z * z) * _INV_SQRT_2PI


def _dip_integral(h, gamma, x, radius, panels, order):
    # Substitute u = x2 + x + h and v = x3 - x2 + h - gamma, both on [0, inf).
    u, wu = _quadrature.gauss_legendre_panels(0.0, radius, panels, order)
    v, wv = _quadrature.gauss_legendre_panels(0.0, radius, panels, order)
    U, V = np.meshgrid(u, v, indexing="ij")
    x2 = U - x - h
    x3 = V + x2 - h + gamma
    m = np.empty(U.shape + (4, 4))
    m[..., 0, 0] = _phi(x)
    m[..., 0, 1] = _phi(-x2 - h)
    m[..., 0, 2] = _phi(-x3 - 2 * h + gamma)
    m[..., 0, 3] = ndtr(-x3 - 2 * h + gamma)
    m[..., 1, 0] = _phi(h)
    m[..., 1, 1] = _phi(-x - x2)
    m[..., 1, 2] = _phi(-x - x3 - h + gamma)
    m[..., 1, 3] = ndtr(-x - x3 - h + gamma)
    m[..., 2, 0] = _phi(x2 + 2 * h + x)
    m[..., 2, 1] = _phi(h)
    m[..., 2, 2] = _phi(x2 - x3 + gamma)
    m[..., 2, 3] = ndtr(x2 - x3 + gamma)
    m[..., 3, 0] = _phi(x3 + 3 * h - gamma + x)
    m[..., 3, 1] = _phi(x3 + 2 * h - gamma - x2)
    m[..., 3, 2] = _phi(h)
    m[..., 3, 3] = ndtr(h)
    # exp(gamma^2/2 - gamma (x3 - x2)) with x3 - x2 = v - h + gamma
    weight = np.exp(-0.5 * gamma * gamma - gamma * (V - h))
    integrand = np.linalg.det(m) * weight
    return float(np.einsum("i,j,ij->", wu, wv, integrand)) / float(_phi(x))


def F_h0_neg_gamma(h, gamma, x=0.0, radius=12.0, panels=12, order=16, tol=1e-9):
    """``F_{h,0,-gamma,gamma}(3 | x)``: no crossing of the dipping barrier on ``[0, 3]``.

    Evaluates the two-dimensional integral of the 4x4 Gaussian determinant
    with tensor Gauss-Legendre panels on a truncated quadrant. The
    truncation radius is validated by doubling it (with twice the panels);
    the doubling repeats until two radii agree to ``tol``.

    Raises
    ------
    QuadratureError
        No agreement up to a radius of 96.
    """
    h = check_real(h, "h")
    gamma = check_real(gamma, "gamma")
    if gamma < 0:
        raise ConfigurationError(f"gamma must be >= 0; got {gamma}")
    x = check_real(x, "x")
    if x > h:
        raise ConfigurationError("F_h0_neg_gamma needs x <= h")
    prev = _dip_integral(h, gamma, x, radius, panels, order)
    while radius <= 48.0:
        radius, panels = 2.0 * radius, 2 * panels
        cur = _dip_integral(h, gamma, x, radius, panels, order)
        if abs(cur - prev) <= tol:
            return min(max(cur, 0.0), 1.0)
        prev = cur
    raise QuadratureError(f"truncated integral did not settle for h={h}, gamma={gamma}")


def diffusion_power(h, gamma):
    """``1 - F_{h,0,-gamma,gamma}(3|0) / F_{h,0}(1|0)`` (continuous time)."""
    f1 = F_h0_1(h, 0.0)
    if f1 <= 0.0:
        raise ConfigurationError(f"F_h0_1(h, 0) vanishes at h={h}")
    return min(max(1.0 - F_h0_neg_gamma(h, gamma) / f1, 0.0), 1.0)


def discrete_power(h, A, L, sigma=1.0, l=None, rho=None):
    """Power of the MOSUM rule with the discrete-time barrier correction.

    Uses ``gamma = A sqrt(L) / sigma`` and ``h_L = h + omega_L`` in place of
    ``h`` in :func:`diffusion_power`.
    """
    check_positive(L, "L", integer=True)
    _require_unit_ratio(l, L)
    A = check_real(A, "A")
    sigma = check_positive(sigma, "sigma")
    gamma = A * math.sqrt(L) / sigma
    return diffusion_power(h + omega(L, rho), gamma)


def _power_layout(L, l):
    nu = 3 * L
    nu_prime = nu - L
    n_obs = nu + l - 1 + L
    return nu, nu_prime, n_obs


def _moving_sums(y, L):
    c = np.zeros((y.shape[0], y.shape[1] + 1))
    np.cumsum(y, axis=1, out=c[:, 1:])
    return c[:, L:] - c[:, :-L]  # column n is S_{n,L}, n = 0 .. T - L


def empirical_power_mosum(h, A, L, l=None, reps=100_000, seed=0, sigma=1.0, block=10_000):
    """Monte Carlo power ``P_xi(h, A, L)`` with burn-in ``nu = 3L``.

    Streams are pre-change up to ``nu``, carry the shift on ``nu+1 .. nu+l``
    and are monitored by ``xi_{n,L}``. Among streams with
    ``xi_{n,L} <= h`` for all ``n <= nu' = nu - L`` the estimate is the
    fraction with ``xi_{n,L} > h`` for some ``n`` in ``[nu'+1, nu+l-1]``.

    Raises
    ------
    SimulationError
        No stream survives the conditioning period.
    """
    return empirical_power_curve(h, [A], L, l, reps, seed, sigma, block)[0]


def empirical_power_curve(h, amplitudes, L, l=None, reps=100_000, seed=0, sigma=1.0, block=10_000):
    """:func:`empirical_power_mosum` for several shifts on common noise."""
    check_positive(L, "L", integer=True)
    l = L if l is None else l
    check_positive(l, "l", integer=True)
    check_positive(reps, "reps", integer=True)
    h = check_real(h, "h")
    sigma = check_positive(sigma, "sigma")
    nu, nu_prime, n_obs = _power_layout(L, l)
    amplitudes = [check_real(a, "A") for a in amplitudes]
    pre_ok = 0
    hits = np.zeros(len(amplitudes), dtype=np.int64)
    scale = sigma * math.sqrt(L)
    for start in range(0, reps, block):
        idx = range(start, min(start + block, reps))
        eps = noise_block(seed, idx, n_obs)
        s0 = _moving_sums(eps, L)
        ok = (s0[:, : nu_prime + 1] * sigma / scale <= h).all(axis=1)
        pre_ok += int(ok.sum())
        s0 = s0[ok]
        # window sums of the signal, i.e. Q(n) / A for n = nu'+1 .. nu+l-1
        n = np.arange(nu_prime + 1, nu + l)
        overlap = np.minimum(n + L, nu + l) - np.maximum(n, nu)
        for k, a in enumerate(amplitudes):
            xi = (s0[:, nu_prime + 1 : nu + l] * sigma + a * overlap) / scale
            hits[k] += int((xi > h).any(axis=1).sum())
    if pre_ok == 0:
        raise SimulationError("no replicate survived the conditioning period")
    out = []
    for k in range(len(amplitudes)):
        p = hits[k] / pre_ok
        out.append(
            PowerEstimate(
                float(p),
                math.sqrt(p * (1.0 - p) / pre_ok),
                nu,
                nu_prime,
                nu + l - 1 - nu_prime,
                reps,
                pre_ok,
                seed,
            )
        )
    return out
