"""Synthetic pressure-test demo: hold periods on top of a known cycle.

A pressure signal ``z_t = s_t + y_t`` follows a known sinusoid ``s_t``.
During a test the pressure is held, which shows up in the residual
``y_t = z_t - s_t`` as a temporary mean shift. A MOSUM detector on the
residuals, with repeated application after each alarm, locates the tests;
alarms closer than ``2L`` apart are merged into one cluster.

The shapes (period, amplitudes, gaps) are illustrative choices, not fitted
to real rig data.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive
from .detectors import MOSUM


@dataclass(frozen=True)
class PressureScenario:
    """Layout of a synthetic record.

    Attributes
    ----------
    n_tests : int
        Number of embedded hold periods.
    length_range : (int, int)
        Hold lengths are drawn uniformly from this closed range.
    amplitude_range : (float, float)
        Hold shifts in noise standard deviations, drawn uniformly.
    lead : int
        Observations before the first hold (plus up to 50 more at random).
    gap : int
        Observations between holds (plus up to 50 more at random).
    tail : int
        Observations after the last hold.
    horizon : int, optional
        Total length; by default ``lead .. tail`` determines it. Required
        when ``n_tests = 0``.
    base_level, cycle_amplitude, period : float
        The known cycle ``base_level + cycle_amplitude sin(2 pi t / period)``.
    sigma : float
        Noise standard deviation.
    """

    n_tests: int = 3
    length_range: tuple = (50, 100)
    amplitude_range: tuple = (1.0, 2.0)
    lead: int = 150
    gap: int = 200
    tail: int = 150
    horizon: int = None
    base_level: float = 100.0
    cycle_amplitude: float = 5.0
    period: float = 400.0
    sigma: float = 1.0


@dataclass(frozen=True)
class PressureRecord:
    """A generated record.

    ``tests`` lists ``(start, length, amplitude)`` with the hold occupying
    observations ``start+1 .. start+length`` (1-based), amplitude in units of
    the noise standard deviation.
    """

    z: np.ndarray
    cycle: np.ndarray
    tests: tuple
    sigma: float

    @property
    def residuals(self):
        return self.z - self.cycle


@dataclass(frozen=True)
class PressureResult:
    """Detector output on a record."""

    record: PressureRecord
    statistic: np.ndarray
    threshold: float
    alarms: tuple
    clusters: tuple
    window: int


def generate(scenario=PressureScenario(), seed=0):
    """Draw a record of the scenario from ``numpy.random.default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    lo, hi = scenario.length_range
    a_lo, a_hi = scenario.amplitude_range
    tests = []
    t = scenario.lead + int(rng.integers(0, 51))
    for k in range(scenario.n_tests):
        length = int(rng.integers(lo, hi + 1))
        amp = float(rng.uniform(a_lo, a_hi))
        tests.append((t, length, amp))
        t += length
        if k < scenario.n_tests - 1:
            t += scenario.gap + int(rng.integers(0, 51))
    if scenario.horizon is not None:
        T = int(scenario.horizon)
    elif scenario.n_tests:
        T = t + scenario.tail
    else:
        raise ValueError("horizon is required when there are no tests")
    if T < t:
        raise ValueError(f"horizon {T} is shorter than the tests ({t})")
    idx = np.arange(1, T + 1)
    cycle = scenario.base_level + scenario.cycle_amplitude * np.sin(2.0 * math.pi * idx / scenario.period)
    shift = np.zeros(T)
    for start, length, amp in tests:
        shift[start : start + length] = amp * scenario.sigma
    z = cycle + shift + scenario.sigma * rng.standard_normal(T)
    return PressureRecord(z, cycle, tuple(tests), scenario.sigma)


def cluster_alarms(times, gap):
    """Group sorted alarm times; a new cluster starts after more than ``gap``."""
    clusters = []
    for n in sorted(times):
        if clusters and n - clusters[-1][-1] <= gap:
            clusters[-1].append(n)
        else:
            clusters.append([n])
    return tuple(tuple(c) for c in clusters)


def run_demo(record, window=75, target_arl=5000, threshold=None):
    """MOSUM with repeated application on the residuals of ``record``.

    The residuals have mean 0 and the record's ``sigma`` before and after
    the holds. The threshold is calibrated to ``target_arl`` unless given.
    """
    check_positive(window, "window", integer=True)
    if threshold is None:
        det = MOSUM(window=window, mu=0.0, sigma=record.sigma, target_arl=target_arl)
    else:
        det = MOSUM(window=window, mu=0.0, sigma=record.sigma, threshold=threshold)
    det.fit()
    y = record.residuals
    alarms = tuple(det.detect(y))
    clusters = cluster_alarms([a.n for a in alarms], 2 * window)
    return PressureResult(record, det.transform(y), det.threshold_, alarms, clusters, window)
