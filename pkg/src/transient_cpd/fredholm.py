"""Integral-equation solver for the run lengths of CUSUM and Shiryaev-Roberts.

For a Markov statistic ``S_n = xi(S_{n-1}) g(y_n)/f(y_n)`` stopped at
``inf{n : S_n > H}`` the mean run length from ``S_0 = s`` solves::

    phi(s) = 1 + int_0^H phi(x) d/dx F(x / xi(s)) dx

with ``xi(s) = max(1, s)`` for CUSUM and ``xi(s) = 1 + s`` for SR, and ``F``
the distribution function of the likelihood ratio under the regime of
interest (no change for the ARL, change at time zero for the delay).

The equation is discretized by the Nystrom method in ``u = log x``. There the
likelihood-ratio density is Gaussian, so uniform composite Gauss-Legendre
panels in ``u`` are dense near ``x = 0``, where the ratio-scale kernel is
steep. CUSUM has an atom: every ``s <= 1`` restarts from ``xi = 1``, so
``phi`` is constant there and carried as one extra unknown.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.optimize import brentq
from scipy.special import ndtr

from ._quadrature import gauss_legendre_panels
from ._validation import check_positive
from .exceptions import CalibrationError, ConfigurationError, ConvergenceError, NumericalError

_ORDER = 8
_MAX_GRID = 8192
# SR states below exp(U_FLOOR) are reached with probability < Phi(-12).
_SR_FLOOR_SD = 12.0

PROCEDURES = ("cusum", "sr")
REGIMES = ("null", "zero_delay")


@dataclass(frozen=True)
class FredholmProblem:
    """Run-length equation for ``procedure`` at ratio-scale threshold ``H``.

    Parameters
    ----------
    procedure : {"cusum", "sr"}
    H : float
        Threshold on the ratio scale (``V_n`` or ``R_n``), ``H > 0``.
    A : float
        Standardized shift ``A / sigma``.
    regime : {"null", "zero_delay"}
        ``"null"`` gives the ARL to false alarm, ``"zero_delay"`` the mean
        delay ``E_0 tau`` for a change at time zero.
    grid_size : int
        Number of quadrature nodes (a multiple of 8 is used), at least 64.
    """

    procedure: str
    H: float
    A: float = 1.0
    regime: str = "null"
    grid_size: int = 1024

    def __post_init__(self):
        if self.procedure not in PROCEDURES:
            raise ConfigurationError(f"procedure must be one of {PROCEDURES}")
        if self.regime not in REGIMES:
            raise ConfigurationError(f"regime must be one of {REGIMES}")
        check_positive(self.H, "H")
        check_positive(self.A, "A")
        check_positive(self.grid_size, "grid_size", integer=True)
        if self.grid_size < 64:
            raise ConfigurationError(f"grid_size must be >= 64; got {self.grid_size}")

    @property
    def drift(self):
        """Mean of the log-likelihood ratio under the regime."""
        half = 0.5 * self.A * self.A
        return -half if self.regime == "null" else half

    def with_grid(self, grid_size):
        return FredholmProblem(self.procedure, self.H, self.A, self.regime, grid_size)


@dataclass(frozen=True)
class ArlSolution:
    """Discrete solution of the run-length equation.

    Attributes
    ----------
    grid : ndarray
        Quadrature nodes on the ratio scale, inside ``[0, H]``.
    phi_values : ndarray
        ``phi`` at the nodes.
    phi_at_start : float
        ``phi(1)`` for CUSUM (``V_0 = 1``) or ``phi(0)`` for SR (``R_0 = 0``).
    residual : float
        Max-norm residual of the discrete linear system.
    grid_size : int
    converged : bool
        Whether the last grid doubling changed ``phi_at_start`` by less than
        the requested tolerance (``True`` for single-grid solves).
    """

    grid: np.ndarray
    phi_values: np.ndarray
    phi_at_start: float
    residual: float
    grid_size: int
    converged: bool = True


def kernel_cdf(x, A, regime="null"):
    """``F(x) = Pr(g(y)/f(y) <= x)`` for the standardized Gaussian pair.

    Equal to ``Phi((log x + A^2/2) / A)`` without a change and
    ``Phi((log x - A^2/2) / A)`` under a change.
    """
    A = check_positive(A, "A")
    if regime not in REGIMES:
        raise ConfigurationError(f"regime must be one of {REGIMES}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise ConfigurationError("kernel_cdf needs x >= 0")
    drift = -0.5 * A * A if regime == "null" else 0.5 * A * A
    with np.errstate(divide="ignore"):
        out = ndtr((np.log(x) - drift) / A)
    return out if out.ndim else float(out)


def _density(u, c, drift, A):
    z = (u[None, :] - c[:, None] - drift) / A
    return np.exp(-0.5 * z * z) / (A * math.sqrt(2.0 * math.pi))


def _nodes(lo, hi, grid_size):
    panels = max(grid_size // _ORDER, 1)
    return gauss_legendre_panels(lo, hi, panels, _ORDER)


def _solve_cusum(problem):
    A, m = problem.A, problem.drift
    logH = math.log(problem.H)
    if logH <= 0.0:
        # V_n <= H <= 1 always restarts from 1: geometric run length.
        p_stop = 1.0 - float(ndtr((logH - m) / A))
        if p_stop <= 0.0:
            raise NumericalError("stopping probability underflows")
        return ArlSolution(np.array([1.0]), np.array([1.0 / p_stop]), 1.0 / p_stop, 0.0, 1)
    u, w = _nodes(0.0, logH, problem.grid_size)
    c = np.concatenate([[0.0], u])  # row 0 is the restart state xi = 1
    n = u.size
    system = np.empty((n + 1, n + 1))
    system[:, 0] = -ndtr((0.0 - c - m) / A)
    system[:, 1:] = -_density(u, c, m, A) * w[None, :]
    system[np.diag_indices(n + 1)] += 1.0
    rhs = np.ones(n + 1)
    phi = _linear_solve(system, rhs)
    residual = float(np.max(np.abs(system @ phi - rhs)))
    return ArlSolution(np.exp(u), phi[1:], float(phi[0]), residual, n)


def _solve_sr(problem):
    A, m = problem.A, problem.drift
    logH = math.log(problem.H)
    lo = min(m, 0.0) - _SR_FLOOR_SD * A
    if logH <= lo:
        raise ConfigurationError(f"SR threshold H={problem.H} is too small to resolve")
    u, w = _nodes(lo, logH, problem.grid_size)
    c = np.log1p(np.exp(u))
    n = u.size
    system = -_density(u, c, m, A) * w[None, :]
    system[np.diag_indices(n)] += 1.0
    rhs = np.ones(n)
    phi = _linear_solve(system, rhs)
    residual = float(np.max(np.abs(system @ phi - rhs)))
    start = 1.0 + float(_density(u, np.zeros(1), m, A)[0] @ (w * phi))
    return ArlSolution(np.exp(u), phi, start, residual, n)


def _linear_solve(system, rhs):
    try:
        phi = linalg.solve(system, rhs, check_finite=True)
    except linalg.LinAlgError as exc:
        raise NumericalError(f"singular Nystrom system: {exc}") from exc
    if not np.all(np.isfinite(phi)):
        raise NumericalError("non-finite solution of the Nystrom system")
    return phi


def solve_fixed(problem):
    """Solve on exactly ``problem.grid_size`` nodes, without refinement."""
    if problem.procedure == "cusum":
        return _solve_cusum(problem)
    return _solve_sr(problem)


def solve(problem, tol_rel=1e-6, max_grid=_MAX_GRID):
    """Solve the run-length equation, doubling the grid until stable.

    Parameters
    ----------
    problem : FredholmProblem
    tol_rel : float
        Relative change in ``phi_at_start`` between successive grids that
        counts as converged.
    max_grid : int
        Refinement cap.

    Returns
    -------
    ArlSolution
        Solution on the finer of the last two grids.

    Raises
    ------
    ConvergenceError
        The cap was reached before two successive grids agreed.
    """
    coarse = solve_fixed(problem)
    size = problem.grid_size
    while 2 * size <= max_grid:
        size *= 2
        fine = solve_fixed(problem.with_grid(size))
        if abs(fine.phi_at_start - coarse.phi_at_start) <= tol_rel * abs(fine.phi_at_start):
            return fine
        coarse = fine
    raise ConvergenceError(
        f"run length did not stabilise by grid_size={max_grid} "
        f"(last value {coarse.phi_at_start:.6g})"
    )


def arl(procedure, H, A, grid_size=1024):
    """ARL to false alarm from the initial state."""
    return solve(FredholmProblem(procedure, H, A, "null", grid_size)).phi_at_start


def detection_delay(problem):
    """``E_0 tau`` for a change at time zero (``problem.regime == "zero_delay"``).

    For CUSUM and SR this equals Lorden's worst-case and Pollak's supremum
    average delays.
    """
    if problem.regime != "zero_delay":
        raise ConfigurationError("detection_delay needs regime='zero_delay'")
    return solve(problem).phi_at_start


def threshold_for_arl(procedure, target, A, grid_size=1024, xtol=1e-10):
    """Ratio-scale threshold whose exact ARL equals ``target``.

    The search runs in ``log H`` on a fixed grid; the run length is
    increasing in ``H`` so the root is unique.
    """
    from .arl import cusum_threshold_fast, sr_threshold_fast

    target = check_positive(target, "target")
    if target <= 1.0:
        raise ConfigurationError("target ARL must exceed 1")
    fast = cusum_threshold_fast if procedure == "cusum" else sr_threshold_fast
    guess = math.log(max(fast(target, A), 1e-3))

    def gap(logh):
        sol = solve_fixed(FredholmProblem(procedure, math.exp(logh), A, "null", grid_size))
        return math.log(sol.phi_at_start) - math.log(target)

    lo, hi = guess - 0.5, guess + 0.5
    for _ in range(60):
        if gap(lo) < 0.0:
            break
        lo -= 1.0
    else:
        raise CalibrationError("could not bracket the threshold from below")
    for _ in range(60):
        if gap(hi) > 0.0:
            break
        hi += 1.0
    else:
        raise CalibrationError("could not bracket the threshold from above")
    return math.exp(brentq(gap, lo, hi, xtol=xtol))
