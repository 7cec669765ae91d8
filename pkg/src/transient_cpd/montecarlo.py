"""Seeded Monte Carlo engine for run lengths, crossing probabilities, power
and threshold calibration.

Replicate ``i`` of a simulation with seed ``s`` consumes
``numpy.random.default_rng([s, i])``, the same stream that
:func:`transient_cpd.model.sample_stream` produces for ``rng_seed=(s, i)``.
Replicates advance in blocks, in lockstep over geometrically growing time
chunks, and leave the block once they alarm. Batching therefore never
changes a result, and estimates at different thresholds share their noise
(common random numbers), which makes the estimated ARL monotone in the
threshold.
"""

import copy
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ._rng import replicate_rng
from ._validation import check_positive, check_real
from .exceptions import CalibrationError, ConfigurationError, SimulationError
from .model import ChangeAt, GaussianChangeSpec, NoChange, TransientWindow

_BLOCK = 1024
_FIRST_CHUNK = 256
_MAX_CHUNK = 8192
_DEFAULT_CAP = 10**7
CENSOR_FLAG = 1e-3


@dataclass
class SimulationPlan:
    """What to simulate.

    Parameters
    ----------
    detector : detector estimator
        Fitted, or bindable without data (``mu`` and ``sigma`` given). Its
        threshold is used unless one is passed to the estimating function.
    hypothesis : NoChange or ChangeAt
    replicates : int
    max_steps : int, optional
        Censoring cap in observations. Defaults to 100 times the detector's
        ``target_arl`` when set, otherwise 10^7.
    seed : int
    spec : GaussianChangeSpec, optional
        Law of the simulated data. Defaults to the detector's own
        ``mu``/``sigma`` with its amplitude (1 for MOSUM).
    n_jobs : int
        Worker processes for replicate blocks; results do not depend on it.
    """

    detector: Any
    hypothesis: Any = field(default_factory=NoChange)
    replicates: int = 10_000
    max_steps: Optional[int] = None
    seed: int = 0
    spec: Optional[GaussianChangeSpec] = None
    n_jobs: int = 1

    def __post_init__(self):
        check_positive(self.replicates, "replicates", integer=True)
        if self.max_steps is not None:
            check_positive(self.max_steps, "max_steps", integer=True)
        check_positive(self.n_jobs, "n_jobs", integer=True)


@dataclass(frozen=True)
class RunLengthEstimate:
    """Mean stopping time over replicates.

    Attributes
    ----------
    mean, std_error : float
        Over uncensored and censored replicates alike (censored ones count
        at the cap), in observations.
    censored_count : int
        Replicates that reached the cap without an alarm.
    replicates, seed : int
    offset : int
        Warm-up offset of the rule (``L`` for MOSUM, ``l1`` for the
        generalized MOSUM, 0 otherwise).
    threshold : float
    """

    mean: float
    std_error: float
    censored_count: int
    replicates: int
    seed: int
    offset: int = 0
    threshold: float = math.nan
    run_lengths: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def scan_mean(self):
        """Mean of the scan index ``tau_S = tau - offset``."""
        return self.mean - self.offset

    @property
    def censored_fraction(self):
        return self.censored_count / self.replicates

    @property
    def flagged(self):
        """True when more than 0.1% of replicates were censored."""
        return self.censored_fraction > CENSOR_FLAG

    def to_dict(self):
        return {
            "mean": self.mean,
            "std_error": self.std_error,
            "scan_mean": self.scan_mean,
            "censored_count": self.censored_count,
            "replicates": self.replicates,
            "seed": self.seed,
            "offset": self.offset,
            "threshold": self.threshold,
        }


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of :func:`calibrate_threshold`.

    ``history`` holds one ``(lower, arl_lower, upper, arl_upper, replicates)``
    tuple per round, with thresholds on the natural scale.
    """

    threshold: float
    estimate: RunLengthEstimate
    seed_threshold: float
    converged: bool
    history: tuple = ()


# -- helpers -----------------------------------------------------------------


def _bound(detector):
    """A copy of ``detector`` with ``mu_``/``sigma_`` fixed."""
    det = copy.deepcopy(detector)
    if not hasattr(det, "mu_"):
        det._bind(None)
    return det


def _data_transform(det, spec):
    """Affine map of standard normal noise to the detector's standardized scale."""
    if spec is None:
        amp = float(getattr(det, "amplitude", 1.0))
        spec = GaussianChangeSpec(det.mu_, amp, det.sigma_)
    offset = (spec.mu - det.mu_) / det.sigma_
    scale = spec.sigma / det.sigma_
    shift = spec.amplitude / det.sigma_
    return offset, scale, shift


def _signal(hypothesis, t0, length):
    """0/1 mask of the change window over observations ``t0+1 .. t0+length``."""
    if isinstance(hypothesis, NoChange):
        return None
    k = np.arange(t0 + 1, t0 + length + 1)
    inside = k > hypothesis.nu
    if hypothesis.l is not None:
        inside &= k <= hypothesis.nu + hypothesis.l
    return inside if inside.any() else None


def _threshold_on_kernel(det, threshold):
    if threshold is None:
        if not hasattr(det, "threshold_"):
            det.fit()  # det is already a private copy
        threshold = det.threshold_
    return float(threshold), det._kernel_threshold(threshold)


def _default_cap(det):
    target = getattr(det, "target_arl", None)
    return int(100 * target) if target else _DEFAULT_CAP


def _block_run_lengths(args):
    det, transform, hypothesis, indices, cap, seed, kthr, floor = args
    offset, scale, shift = transform
    kernel = det._mc_kernel()
    warm = kernel.warmup
    n = len(indices)
    gens = [replicate_rng(seed, i) for i in indices]
    out = np.full(n, cap, dtype=np.int64)
    censored = np.ones(n, dtype=bool)
    active = np.arange(n)
    carry = kernel.init(n)
    # running maximum per replicate, for the record list when floor is set
    peak = np.full(n, -np.inf if floor is None else floor)
    records = []
    t, chunk = 0, _FIRST_CHUNK
    while active.size and t < cap:
        T = min(chunk, cap - t)
        z = np.empty((active.size, T))
        for row, a in enumerate(active):
            gens[a].standard_normal(out=z[row])
        if scale != 1.0:
            z *= scale
        if offset != 0.0:
            z += offset
        mask = _signal(hypothesis, t, T)
        if mask is not None:
            z[:, mask] += shift
        stat, carry = kernel.advance(z, carry)
        if t < warm - 1:
            stat[:, : warm - 1 - t] = -np.inf
        hit = stat > kthr
        done = hit.any(axis=1)
        if floor is not None:
            # a record is a step where the statistic beats every earlier value
            run = np.maximum.accumulate(np.concatenate([peak[active, None], stat], axis=1), axis=1)
            rows, cols = np.nonzero(run[:, 1:] > run[:, :-1])
            records.append((active[rows], t + cols + 1, stat[rows, cols]))
            peak[active] = run[:, -1]
        if done.any():
            rows = active[done]
            out[rows] = t + hit[done].argmax(axis=1) + 1
            censored[rows] = False
            keep = ~done
            carry = {k: v[keep] for k, v in carry.items()}
            active = active[keep]
        t += T
        chunk = min(2 * chunk, _MAX_CHUNK)
    if floor is None:
        return out, censored
    rep, time, value = (np.concatenate(a) for a in zip(*records)) if records else (np.empty(0),) * 3
    order = np.lexsort((time, rep))
    return out, censored, (rep[order].astype(np.int64), time[order].astype(np.int64), value[order])


def _map_blocks(fn, tasks, n_jobs):
    if n_jobs == 1 or len(tasks) == 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, tasks))


def simulate_run_lengths(plan, threshold=None):
    """Per-replicate stopping times (observations) and censoring flags."""
    det = _bound(plan.detector)
    _, kthr = _threshold_on_kernel(det, threshold)
    cap = plan.max_steps or _default_cap(det)
    transform = _data_transform(det, plan.spec)
    tasks = [
        (det, transform, plan.hypothesis, range(s, min(s + _BLOCK, plan.replicates)), cap, plan.seed, kthr, None)
        for s in range(0, plan.replicates, _BLOCK)
    ]
    parts = _map_blocks(_block_run_lengths, tasks, plan.n_jobs)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def estimate_run_length(plan, threshold=None):
    """Mean stopping time under ``plan.hypothesis`` (e.g. ``ChangeAt(0)`` for delay)."""
    det = _bound(plan.detector)
    thr, _ = _threshold_on_kernel(det, threshold)
    lengths, censored = simulate_run_lengths(plan, threshold)
    n_cens = int(censored.sum())
    if n_cens == plan.replicates:
        raise SimulationError(
            f"all {plan.replicates} replicates were censored at the step cap"
        )
    est = RunLengthEstimate(
        float(lengths.mean()),
        float(lengths.std(ddof=1) / math.sqrt(lengths.size)) if lengths.size > 1 else 0.0,
        n_cens,
        plan.replicates,
        plan.seed,
        int(det.offset_),
        thr,
        lengths,
    )
    if est.flagged:
        warnings.warn(
            f"{n_cens} of {plan.replicates} replicates censored; the mean is biased low",
            RuntimeWarning,
            stacklevel=2,
        )
    return est


def estimate_arl(plan, threshold=None):
    """Mean run length to false alarm, in observations.

    ``RunLengthEstimate.scan_mean`` removes the warm-up offset of the
    moving-sum rules.

    Raises
    ------
    ConfigurationError
        The plan's hypothesis is not ``NoChange``.
    SimulationError
        Every replicate was censored.
    """
    if not isinstance(plan.hypothesis, NoChange):
        raise ConfigurationError("estimate_arl needs a NoChange hypothesis")
    return estimate_run_length(plan, threshold)


# -- maxima and boundary-crossing probabilities ------------------------------


def _block_maxima(args):
    det, transform, hypothesis, indices, horizons, seed = args
    offset, scale, shift = transform
    kernel = det._mc_kernel()
    warm = kernel.warmup
    n_obs = warm + max(horizons)
    z = np.empty((len(indices), n_obs))
    for row, i in enumerate(indices):
        replicate_rng(seed, i).standard_normal(out=z[row])
    z = z * scale + offset
    mask = _signal(hypothesis, 0, n_obs)
    if mask is not None:
        z[:, mask] += shift
    stat, _ = kernel.advance(z, kernel.init(len(indices)))
    running = np.maximum.accumulate(stat[:, warm - 1 :], axis=1)
    return running[:, list(horizons)]


def simulate_maxima(detector, horizons, reps, seed=0, hypothesis=None, spec=None, n_jobs=1):
    """Maximum of the statistic over scan indices ``0..M`` for each ``M``.

    Scan index ``j`` is the statistic after ``warmup + j`` observations.
    Returns an array of shape ``(reps, len(horizons))`` on the statistic's
    natural scale.
    """
    det = _bound(detector)
    horizons = [int(check_positive(m, "M", strict=False, integer=True)) for m in horizons]
    check_positive(reps, "reps", integer=True)
    transform = _data_transform(det, spec)
    hypothesis = NoChange() if hypothesis is None else hypothesis
    tasks = [
        (det, transform, hypothesis, range(s, min(s + _BLOCK * 8, reps)), horizons, seed)
        for s in range(0, reps, _BLOCK * 8)
    ]
    parts = _map_blocks(_block_maxima, tasks, n_jobs)
    return det._from_kernel_scale(np.concatenate(parts, axis=0))


def estimate_bcp(detector, H, M, reps=100_000, seed=0, n_jobs=1):
    """``Pr(statistic < H at every scan index 0..M)`` under no change.

    ``M`` may be an int or a sequence; for the generalized MOSUM the values
    at ``M = l1`` and ``M = 2 l1`` are the base probabilities of the
    geometric run-length approximation.
    """
    H = check_real(H, "H")
    scalar = np.ndim(M) == 0
    horizons = [M] if scalar else list(M)
    maxima = simulate_maxima(detector, horizons, reps, seed, n_jobs=n_jobs)
    probs = (maxima < H).mean(axis=0)
    return float(probs[0]) if scalar else probs


def genmosum_arl_route(detector, thresholds, reps=100_000, seed=0):
    """Run-length approximation on simulated base probabilities.

    Both base probabilities come from the same simulated paths.

    Returns
    -------
    list of (float or None)
        Approximate ``E tau_S`` for each threshold, ``None`` where the
        approximation is degenerate.
    """
    from .arl import genmosum_arl
    from .exceptions import DegenerateApproximationError, ConfigurationError as _CE

    det = _bound(detector)
    window = TransientWindow(det.l0, det.l1)
    maxima = simulate_maxima(det, [det.l1, 2 * det.l1], reps, seed)
    out = []
    for H in np.atleast_1d(thresholds):
        f1, f2 = (maxima < H).mean(axis=0)
        try:
            out.append(genmosum_arl(float(H), window, float(f1), float(f2)))
        except (DegenerateApproximationError, _CE):
            out.append(None)
    return out


def genmosum_threshold_seed(detector, target, reps=20_000, seed=0):
    """Threshold whose simulated-base-probability approximation gives ``target``.

    ``target`` is the mean stopping time in observations; the approximation
    is inverted for ``target - l1`` on the empirical distribution of the
    maxima over ``l1`` and ``2 l1`` scan steps.
    """
    from .arl import genmosum_arl

    det = _bound(detector)
    goal = float(target) - det.l1
    if goal <= 0:
        raise ConfigurationError(f"target ARL must exceed l1={det.l1}")
    window = TransientWindow(det.l0, det.l1)
    maxima = simulate_maxima(det, [det.l1, 2 * det.l1], reps, seed)
    m1, m2 = np.sort(maxima[:, 0]), np.sort(maxima[:, 1])

    def approx(H):
        f1 = np.searchsorted(m1, H, side="left") / reps
        f2 = np.searchsorted(m2, H, side="left") / reps
        if not (0.0 < f2 <= f1 < 1.0) or f2 == f1:
            return None
        return genmosum_arl(H, window, f1, f2)

    grid = np.unique(np.quantile(m2, np.linspace(0.05, 0.9999, 400)))
    vals = [approx(H) for H in grid]
    for lo, hi, vlo, vhi in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if vlo is not None and vhi is not None and vlo <= goal < vhi:
            w = (math.log(goal) - math.log(vlo)) / (math.log(vhi) - math.log(vlo))
            return float(lo + w * (hi - lo))
    # fall back to the empirical tail of the maxima over 2 l1 steps
    return float(np.quantile(m2, 1.0 - min(0.5, 2.0 * det.l1 / goal)))


# -- calibration -------------------------------------------------------------


class _RunLengthCurve:
    """Run lengths at every threshold up to the simulated one, from records.

    With common random numbers a replicate stops at threshold ``x`` at the
    first record of its statistic above ``x``, so one simulation at the
    upper threshold gives the exact run lengths at all lower ones.
    """

    def __init__(self, reps, cap, records):
        self.reps, self.cap = reps, cap
        self.rep, self.time, self.value = records
        ids = np.arange(reps)
        self.starts = np.searchsorted(self.rep, ids, side="left")
        self.ends = np.searchsorted(self.rep, ids, side="right")

    def lengths(self, x):
        below = np.concatenate([[0], np.cumsum(self.value <= x)])
        idx = self.starts + (below[self.ends] - below[self.starts])
        hit = idx < self.ends
        out = np.full(self.reps, self.cap, dtype=np.int64)
        out[hit] = self.time[idx[hit]]
        return out, ~hit

    def mean(self, x):
        return float(self.lengths(x)[0].mean())


def _simulate_curve(det, reps, cap, seed, hi, lo, n_jobs):
    transform = _data_transform(det, None)
    tasks = [
        (det, transform, NoChange(), range(s, min(s + _BLOCK, reps)), cap, seed, hi, lo)
        for s in range(0, reps, _BLOCK)
    ]
    parts = _map_blocks(_block_run_lengths, tasks, n_jobs)
    reps_, times, values = [], [], []
    for start, (_, _, (rep, time, value)) in zip(range(0, reps, _BLOCK), parts):
        reps_.append(rep + start)
        times.append(time)
        values.append(value)
    records = (np.concatenate(reps_), np.concatenate(times), np.concatenate(values))
    return _RunLengthCurve(reps, cap, records)


def calibrate_threshold(
    detector,
    target_arl,
    tol_rel=0.01,
    seed=0,
    reps=100_000,
    min_reps=None,
    max_rounds=8,
    n_jobs=1,
):
    """Threshold ``H`` with simulated mean stopping time ``target_arl``.

    The analytic approximation of the detector gives a starting point. Each
    round simulates every replicate up to an upper threshold while keeping
    the records of its statistic above a lower one, which yields the exact
    simulated ARL at every threshold in between; that monotone curve is
    inverted. The bracket is moved out when it misses the target and
    narrowed to the sampling error otherwise, while the replicate count
    grows fourfold per round up to ``reps``. The search runs on the log
    scale for ``V_n`` and ``R_n``.

    Parameters
    ----------
    detector : detector estimator
    target_arl : float
        Mean stopping time in observations; must exceed the warm-up.
    tol_rel : float
        Accept when ``|ARL(H)/target - 1| <= tol_rel`` at the full
        replicate count.
    seed : int
    reps : int
        Replicates of the final round.
    min_reps : int, optional
        Lower bound on the first round's replicates (default
        ``max(1000, reps / 64)``); rounds then quadruple up to ``reps``.
    max_rounds : int
        Rounds at the full replicate count before giving up.

    Returns
    -------
    CalibrationResult

    Raises
    ------
    CalibrationError
        The target was not bracketed within 40 rounds.
    """
    det = _bound(detector)
    C = check_positive(target_arl, "target_arl")
    if C <= det.warmup_:
        raise ConfigurationError(f"target ARL must exceed the warm-up of {det.warmup_}")
    reps = int(check_positive(reps, "reps", integer=True))
    first = min(int(min_reps or max(1_000, reps // 64)), reps)
    level = 0
    while reps / 4 ** (level + 1) >= first:
        level += 1
    n = math.ceil(reps / 4**level)
    cap = int(100 * C)
    history = []

    def to_natural(x):
        return float(det._from_kernel_scale(np.asarray(x, dtype=float)))

    seed_H = float(det._seed_threshold(C, seed=seed))
    x = det._kernel_threshold(seed_H)
    margin = 0.1 * max(1.0, abs(x))
    full_rounds = 0
    for _ in range(40):
        lo, hi = x - margin, x + margin
        curve = _simulate_curve(det, n, cap, seed, hi, lo, n_jobs)
        top, bottom = curve.mean(hi), curve.mean(lo)
        history.append((to_natural(lo), bottom, to_natural(hi), top, n))
        if top < C:
            x, margin = hi + margin, 2.0 * margin
            continue
        if bottom > C:
            x, margin = lo - margin, 2.0 * margin
            continue
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if curve.mean(mid) < C:
                lo = mid
            else:
                hi = mid
        # of the two sides of the step, keep the one nearer the target
        x = lo if abs(curve.mean(lo) - C) <= abs(curve.mean(hi) - C) else hi
        if n >= reps:
            full_rounds += 1
            lengths, censored = curve.lengths(x)
            if abs(lengths.mean() / C - 1.0) <= tol_rel or full_rounds >= max_rounds:
                break
        # next bracket: four standard errors of the root at this replicate count
        slope = math.log(top / bottom) / (2.0 * margin) if top > bottom else 1.0 / margin
        margin = min(margin, 4.0 / (slope * math.sqrt(n)))
        level = max(level - 1, 0)
        n = math.ceil(reps / 4**level)
    else:
        raise CalibrationError(f"could not bracket target ARL {C}")
    n_cens = int(censored.sum())
    est = RunLengthEstimate(
        float(lengths.mean()),
        float(lengths.std(ddof=1) / math.sqrt(lengths.size)),
        n_cens,
        reps,
        seed,
        int(det.offset_),
        to_natural(x),
        lengths,
    )
    ok = abs(est.mean / C - 1.0) <= tol_rel
    if not ok:
        warnings.warn(
            f"calibration stopped at ARL {est.mean:.1f} for target {C}",
            RuntimeWarning,
            stacklevel=2,
        )
    return CalibrationResult(to_natural(x), est, seed_H, ok, tuple(history))


# -- power comparison --------------------------------------------------------


@dataclass(frozen=True)
class ThreeWayPower:
    """Detection power of MOSUM, generalized MOSUM and CUSUM at a common ARL.

    ``P_S`` maps each MOSUM window ``L`` to its estimate; ``thresholds``
    records the threshold of each rule (``("S", L)``, ``"Z"``, ``"V"``).
    """

    P_S: dict
    P_Z: Any
    P_V: Any
    thresholds: dict
    nu: int

    def as_rows(self, l):
        rows = []
        for L, est in sorted(self.P_S.items()):
            rows.append((l / L, est.probability, self.P_Z.probability, self.P_V.probability))
        return rows


def conditional_power(detector, amplitude, l, nu, reps, seed, threshold=None, block=20_000):
    """``Pr(alarm in (nu, nu + 2l - 1] | no alarm up to nu)`` by simulation.

    Time is counted in observations for every rule. The signal of size
    ``amplitude`` (observation units) occupies ``nu+1 .. nu+l``.
    """
    from .power import PowerEstimate

    det = _bound(detector)
    _, kthr = _threshold_on_kernel(det, threshold)
    kernel = det._mc_kernel()
    warm = kernel.warmup
    if nu < warm:
        raise ConfigurationError(f"burn-in nu={nu} is shorter than the warm-up {warm}")
    n_obs = nu + 2 * l - 1
    shift = amplitude / det.sigma_
    pre_ok = hits = 0
    for start in range(0, reps, block):
        idx = range(start, min(start + block, reps))
        z = np.empty((len(idx), n_obs))
        for row, i in enumerate(idx):
            replicate_rng(seed, i).standard_normal(out=z[row])
        z[:, nu : nu + l] += shift
        stat, _ = kernel.advance(z, kernel.init(len(idx)))
        cross = stat[:, warm - 1 :] > kthr  # column j is observation warm + j
        before = cross[:, : nu - warm + 1].any(axis=1)
        within = cross[:, nu - warm + 1 :].any(axis=1)
        pre_ok += int((~before).sum())
        hits += int((within & ~before).sum())
    if pre_ok == 0:
        raise SimulationError("no replicate survived the conditioning period")
    p = hits / pre_ok
    return PowerEstimate(
        float(p), math.sqrt(p * (1.0 - p) / pre_ok), nu, nu - det.offset_, 2 * l - 1, reps, pre_ok, seed
    )


def estimate_power_three_way(
    A,
    l,
    window_z,
    L=None,
    C=500,
    reps=100_000,
    seed=0,
    mosum_calibration="analytic",
    calibration_reps=100_000,
    thresholds=None,
):
    """Power of the three rules for a transient of length ``l`` at ARL ``C``.

    Parameters
    ----------
    A : float
        Shift in noise standard deviations (``mu = 0``, ``sigma = 1``).
    l : int
        Signal length.
    window_z : TransientWindow
        Length bounds for the generalized MOSUM.
    L : int or sequence of int, optional
        MOSUM windows (default ``l``).
    C : float
        Common mean stopping time in observations.
    mosum_calibration : {"analytic", "simulation"}
        MOSUM thresholds from the run-length approximation or by simulation.
        The generalized MOSUM and CUSUM thresholds are always calibrated by
        simulation, started from their analytic values.
    thresholds : dict, optional
        Precomputed thresholds keyed like :attr:`ThreeWayPower.thresholds`.

    Notes
    -----
    All rules see the same noise. The burn-in is
    ``nu = 3 max(L, l1, l)``, beyond the ``2L`` needed for stationarity.
    """
    from .detectors import CUSUM, MOSUM, GeneralizedMOSUM

    windows = [l] if L is None else ([L] if np.ndim(L) == 0 else list(L))
    thresholds = dict(thresholds or {})
    nu = 3 * max(max(windows), window_z.l1, l)

    def calibrated(key, det):
        if key not in thresholds:
            thresholds[key] = calibrate_threshold(det, C, seed=seed + 1, reps=calibration_reps).threshold
        return thresholds[key]

    P_S = {}
    for Lw in windows:
        det = MOSUM(window=Lw, mu=0.0, sigma=1.0)
        key = ("S", Lw)
        if key not in thresholds and mosum_calibration == "analytic":
            from .arl import mosum_threshold_for_arl

            thresholds[key] = mosum_threshold_for_arl(C - Lw, Lw) * math.sqrt(Lw)
        H = calibrated(key, det)
        P_S[Lw] = conditional_power(det, A, l, nu, reps, seed, threshold=H)
    gdet = GeneralizedMOSUM(window_z.l0, window_z.l1, amplitude=A, mu=0.0, sigma=1.0)
    P_Z = conditional_power(gdet, A, l, nu, reps, seed, threshold=calibrated("Z", gdet))
    cdet = CUSUM(amplitude=A, mu=0.0, sigma=1.0, form="page")
    P_V = conditional_power(cdet, A, l, nu, reps, seed, threshold=calibrated("V", cdet))
    return ThreeWayPower(P_S, P_Z, P_V, thresholds, nu)
