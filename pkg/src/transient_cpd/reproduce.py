"""Builders for the run-length tables and the power data series.

Each builder returns a :class:`Table` or :class:`Series` holding analytic
approximations next to their Monte Carlo counterparts, ready to be written
as CSV. Simulated values depend only on ``reps`` and ``seed``.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import arl as _arl
from . import montecarlo as _mc
from .detectors import CUSUM, MOSUM, GeneralizedMOSUM
from .exceptions import ConfigurationError, DegenerateApproximationError
from .model import TransientWindow
from .power import diffusion_power, discrete_power, empirical_power_curve

TABLE_IDS = (1, 2, 3, 4, 5)
FIGURE_IDS = ("fig8", "fig9", "fig12", "fig13")

CUSUM_THRESHOLDS = (9.32, 17.33, 80.65, 159.35, 788.00)
MOSUM_THRESHOLDS = (2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5)
GENMOSUM_WIDE_THRESHOLDS = (-5.0, -4.5, -4.0, -3.5, -3.0, -2.5, -2.0)
GAMMA_GRID = tuple(np.arange(1, 9) / 2.0)


@dataclass(frozen=True)
class Table:
    """Rows of values over a common threshold grid.

    Attributes
    ----------
    name : str
    x_label : str
        Name of the threshold grid.
    x : tuple of float
    rows : tuple of (str, tuple)
        Row label and one value per grid point (``nan`` where undefined).
    """

    name: str
    x_label: str
    x: tuple
    rows: tuple

    def row(self, label):
        for name, values in self.rows:
            if name == label:
                return values
        raise KeyError(label)

    def to_csv(self, fh, digits=1):
        w = csv.writer(fh)
        w.writerow([self.x_label, *self.x])
        for name, values in self.rows:
            w.writerow([name, *(_fmt(v, digits) for v in values)])


@dataclass(frozen=True)
class Series:
    """Columns of a figure's data series, one tuple per row."""

    name: str
    columns: tuple
    rows: tuple

    def column(self, name):
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows], dtype=float)

    def to_csv(self, fh, digits=5):
        w = csv.writer(fh)
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v, digits) for v in r])


def _fmt(v, digits):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None or not math.isfinite(v):
        return "nan"
    return f"{v:.{digits}f}"


# -- tables ------------------------------------------------------------------


def table1(reps=100_000, seed=0, n_jobs=1):
    """CUSUM ``E tau_V(H)`` at ``A = 1`` on the ratio scale."""
    exact = tuple(_arl.cusum_arl_fast(H, 1.0) for H in CUSUM_THRESHOLDS)
    proxy = tuple(_arl.cusum_arl_fast(H, 1.0, proxy=True) for H in CUSUM_THRESHOLDS)
    rows = [("approximation", exact), ("approximation (exp(-rho A) proxy)", proxy)]
    if reps:
        det = CUSUM(amplitude=1.0, mu=0.0, sigma=1.0, form="ratio")
        est = [
            _mc.estimate_arl(_mc.SimulationPlan(det, replicates=reps, seed=seed, n_jobs=n_jobs), threshold=H)
            for H in CUSUM_THRESHOLDS
        ]
        rows += [("simulation", tuple(e.mean for e in est)), ("simulation std. error", tuple(e.std_error for e in est))]
    return Table("table1", "H", CUSUM_THRESHOLDS, tuple(rows))


def _mosum_table(name, L, reps, seed, n_jobs):
    proxy = tuple(_arl.mosum_arl_standardized(h, L, rho=_arl.RHO_PROXY) for h in MOSUM_THRESHOLDS)
    exact = tuple(_arl.mosum_arl_standardized(h, L) for h in MOSUM_THRESHOLDS)
    rows = [("approximation", proxy), ("approximation (exact rho)", exact)]
    if reps:
        det = MOSUM(window=L, mu=0.0, sigma=1.0)
        est = [
            _mc.estimate_arl(
                _mc.SimulationPlan(det, replicates=reps, seed=seed, n_jobs=n_jobs), threshold=h * math.sqrt(L)
            )
            for h in MOSUM_THRESHOLDS
        ]
        rows += [
            ("simulation", tuple(e.scan_mean for e in est)),
            ("simulation std. error", tuple(e.std_error for e in est)),
        ]
    return Table(name, "h", MOSUM_THRESHOLDS, tuple(rows))


def table2(reps=100_000, seed=0, n_jobs=1):
    """MOSUM ``E tau_xi(h)`` (scan index) with ``L = 10``."""
    return _mosum_table("table2", 10, reps, seed, n_jobs)


def table3(reps=100_000, seed=0, n_jobs=1):
    """MOSUM ``E tau_xi(h)`` (scan index) with ``L = 50``."""
    return _mosum_table("table3", 50, reps, seed, n_jobs)


def _route_row(det, thresholds, reps, seed):
    vals = _mc.genmosum_arl_route(det, thresholds, reps=reps, seed=seed)
    return tuple(math.nan if v is None else v for v in vals)


def _genmosum_sim_rows(det, thresholds, reps, seed, n_jobs):
    est = [
        _mc.estimate_arl(_mc.SimulationPlan(det, replicates=reps, seed=seed, n_jobs=n_jobs), threshold=H)
        for H in thresholds
    ]
    return [
        ("simulation", tuple(e.scan_mean for e in est)),
        ("simulation std. error", tuple(e.std_error for e in est)),
    ]


def table4(reps=100_000, seed=0, n_jobs=1):
    """Generalized MOSUM ``E tau_S(H)`` with ``l0 = 25``, ``l1 = 50``, ``A = 1``.

    The approximation uses base probabilities simulated with ``reps``
    replicates, so it needs ``reps > 0``.
    """
    if not reps:
        raise ConfigurationError("table 4 needs simulated base probabilities (reps > 0)")
    det = GeneralizedMOSUM(25, 50, amplitude=1.0, mu=0.0, sigma=1.0)
    xs = GENMOSUM_WIDE_THRESHOLDS
    rows = [("approximation (simulated base probabilities)", _route_row(det, xs, reps, seed))]
    rows += _genmosum_sim_rows(det, xs, reps, seed, n_jobs)
    return Table("table4", "H", xs, tuple(rows))


def table5(reps=100_000, seed=0, n_jobs=1):
    """Generalized MOSUM ``E tau_S(H)`` with ``l0 = 1``, ``l1 = 10``, ``A = 1``."""
    xs = MOSUM_THRESHOLDS
    explicit = []
    for H in xs:
        try:
            explicit.append(_arl.approx2_arl(H, 1.0, 10))
        except DegenerateApproximationError:
            explicit.append(math.nan)
    rows = [("explicit approximation", tuple(explicit))]
    if reps:
        det = GeneralizedMOSUM(1, 10, amplitude=1.0, mu=0.0, sigma=1.0)
        rows.append(("approximation (simulated base probabilities)", _route_row(det, xs, reps, seed)))
        rows += _genmosum_sim_rows(det, xs, reps, seed, n_jobs)
    return Table("table5", "H", xs, tuple(rows))


TABLES = {1: table1, 2: table2, 3: table3, 4: table4, 5: table5}


def build_table(which, reps=100_000, seed=0, n_jobs=1):
    """Dispatch to ``table1`` .. ``table5``."""
    try:
        fn = TABLES[int(which)]
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"table must be one of {TABLE_IDS}; got {which!r}") from exc
    return fn(reps=reps, seed=seed, n_jobs=n_jobs)


# -- figure series -----------------------------------------------------------

POWER_SCENARIOS = {"fig8": (3.0, (5, 20, 100)), "fig9": (4.0, (5, 20, 100))}
COMPARISON_SCENARIOS = {
    "fig12": dict(A=1.0, l=10, window_z=TransientWindow(5, 20), L=tuple(range(5, 21))),
    "fig13": dict(A=0.5, l=20, window_z=TransientWindow(10, 40), L=tuple(range(10, 41))),
}


def power_series(h, windows, gammas=GAMMA_GRID, reps=100_000, seed=0):
    """Empirical MOSUM power against its two approximations, ``l = L``.

    Rows are ``(L, gamma, empirical, std_error, discrete, diffusion)``.
    """
    rows = []
    for L in windows:
        amps = [g / math.sqrt(L) for g in gammas]
        emp = empirical_power_curve(h, amps, L, reps=reps, seed=seed)
        for g, a, e in zip(gammas, amps, emp):
            rows.append((int(L), float(g), e.probability, e.std_error, discrete_power(h, a, L), diffusion_power(h, g)))
    return rows


def comparison_series(A, l, window_z, L, C=500, reps=100_000, seed=0, calibration_reps=100_000):
    """Power of MOSUM over ``lambda = l / L`` against the other two rules.

    Rows are ``(lambda, L, P_S, se_S, P_Z, se_Z, P_V, se_V)``; the
    generalized MOSUM and CUSUM columns do not depend on ``L``.
    """
    res = _mc.estimate_power_three_way(
        A, l, window_z, L=list(L), C=C, reps=reps, seed=seed, calibration_reps=calibration_reps
    )
    rows = []
    for Lw, est in sorted(res.P_S.items(), reverse=True):
        rows.append(
            (
                l / Lw,
                int(Lw),
                est.probability,
                est.std_error,
                res.P_Z.probability,
                res.P_Z.std_error,
                res.P_V.probability,
                res.P_V.std_error,
            )
        )
    return rows, res


def build_series(scenario, reps=100_000, seed=0):
    """Data series for ``fig8``, ``fig9`` (power approximations) or
    ``fig12``, ``fig13`` (three-way comparison)."""
    if scenario in POWER_SCENARIOS:
        h, windows = POWER_SCENARIOS[scenario]
        cols = ("L", "gamma", "empirical", "std_error", "discrete", "diffusion")
        return Series(scenario, cols, tuple(power_series(h, windows, reps=reps, seed=seed)))
    if scenario in COMPARISON_SCENARIOS:
        rows, _ = comparison_series(**COMPARISON_SCENARIOS[scenario], reps=reps, seed=seed, calibration_reps=reps)
        cols = ("lambda", "L", "P_S", "se_S", "P_Z", "se_Z", "P_V", "se_V")
        return Series(scenario, cols, tuple(rows))
    raise ConfigurationError(f"scenario must be one of {FIGURE_IDS}; got {scenario!r}")
