"""Gaussian change model, hypotheses and log-likelihood-ratio primitives.

Observations are i.i.d. N(mu, sigma^2) except inside a change window
``[nu + 1, nu + l]`` (1-based, as everywhere in this package) where the
mean is shifted to ``mu + amplitude``.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ._validation import check_positive, check_real
from .exceptions import ConfigurationError


@dataclass(frozen=True)
class GaussianChangeSpec:
    """Pre-change mean, shift amplitude and noise scale of the Gaussian pair."""

    mu: float = 0.0
    amplitude: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        check_real(self.mu, "mu")
        check_positive(self.amplitude, "amplitude")
        check_positive(self.sigma, "sigma")

    @property
    def standardized_amplitude(self):
        """Shift measured in noise standard deviations, ``A / sigma``."""
        return self.amplitude / self.sigma

    def standardize(self, y):
        """Map observations to unit-variance, zero-mean pre-change units."""
        return (np.asarray(y, dtype=float) - self.mu) / self.sigma


@dataclass(frozen=True)
class TransientWindow:
    """Bounds ``l0 <= l <= l1`` on the length of a transient signal."""

    l0: int
    l1: int

    def __post_init__(self):
        check_positive(self.l0, "l0", integer=True)
        check_positive(self.l1, "l1", integer=True)
        if self.l0 > self.l1:
            raise ConfigurationError(
                f"window needs l0 <= l1; got l0={self.l0}, l1={self.l1}"
            )

    @classmethod
    def exact(cls, length):
        return cls(length, length)

    @property
    def lengths(self):
        return range(self.l0, self.l1 + 1)


@dataclass(frozen=True)
class NoChange:
    """Null hypothesis: every observation is pre-change."""

    def mask(self, n):
        return np.zeros(n, dtype=bool)


@dataclass(frozen=True)
class ChangeAt:
    """Signal occupies observations ``nu + 1, ..., nu + l``.

    ``l=None`` stands for a permanent change (``l = infinity``).
    """

    nu: int
    l: Optional[int] = None

    def __post_init__(self):
        check_positive(self.nu, "nu", strict=False, integer=True)
        if self.l is not None:
            check_positive(self.l, "l", integer=True)

    @property
    def end(self):
        """Last affected index (1-based), or ``None`` for a permanent change."""
        return None if self.l is None else self.nu + self.l

    def mask(self, n):
        idx = np.arange(1, n + 1)
        inside = idx > self.nu
        if self.l is not None:
            inside &= idx <= self.nu + self.l
        return inside


Hypothesis = Union[NoChange, ChangeAt]


def log_likelihood_ratio(y, spec):
    """Return ``log g(y)/f(y)`` for the Gaussian pair in ``spec``.

    Equal to ``A (y - mu - A/2) / sigma^2``; vectorized over ``y``.
    """
    a = spec.amplitude
    out = a * (np.asarray(y, dtype=float) - spec.mu - 0.5 * a) / spec.sigma**2
    return out if out.ndim else float(out)


def segment_llr(ys, spec, nu, end):
    """Sum of the log-likelihood ratios of observations ``nu+1 .. end``.

    Indices are 1-based, so ``segment_llr(ys, spec, 0, len(ys))`` covers the
    whole sequence. Requires ``0 <= nu < end <= len(ys)``.
    """
    ys = np.asarray(ys, dtype=float)
    if not (0 <= nu < end <= ys.shape[0]):
        raise IndexError(
            f"segment needs 0 <= nu < end <= {ys.shape[0]}; got nu={nu}, end={end}"
        )
    return float(np.sum(log_likelihood_ratio(ys[nu:end], spec)))


def sample_stream(spec, hypothesis, n, rng_seed=None):
    """Simulate ``n`` observations under ``hypothesis``.

    ``rng_seed`` is anything accepted by :func:`numpy.random.default_rng`,
    including a ``(master_seed, replicate)`` pair; the Monte Carlo engine uses
    that pair form, so replicate ``i`` of a simulation with seed ``s`` sees
    exactly ``sample_stream(spec, hypothesis, n, (s, i))``.
    """
    check_positive(n, "n", integer=True)
    rng = np.random.default_rng(rng_seed)
    noise = rng.standard_normal(n)
    return spec.mu + spec.sigma * noise + spec.amplitude * hypothesis.mask(n)
