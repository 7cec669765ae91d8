"""Vectorized Monte Carlo kernels against the scalar recursions."""

import numpy as np
import pytest

from transient_cpd import CUSUM, MOSUM, FullLikelihoodRatio, GeneralizedMOSUM, ShiryaevRoberts

DETECTORS = [
    CUSUM(amplitude=0.8, threshold=3.0),
    CUSUM(amplitude=0.8, threshold=3.0, form="ratio"),
    ShiryaevRoberts(amplitude=1.2, threshold=100.0),
    MOSUM(window=9, threshold=3.0),
    GeneralizedMOSUM(3, 11, amplitude=0.7, threshold=1.0),
    GeneralizedMOSUM(1, 1, threshold=1.0),
    FullLikelihoodRatio(amplitude=0.9, threshold=3.0),
]


@pytest.mark.parametrize("det", DETECTORS)
@pytest.mark.parametrize("cuts", [(500,), (1, 2, 3, 500), (7, 40, 41, 500)])
def test_chunked_kernel_equals_recursion(det, cuts):
    det = det.fit()
    rng = np.random.default_rng(5)
    z = rng.standard_normal((3, 500))
    kernel = det._mc_kernel()
    carry = kernel.init(3)
    parts, start = [], 0
    for stop in cuts:
        stat, carry = kernel.advance(z[:, start:stop], carry)
        parts.append(stat)
        start = stop
    path = det._from_kernel_scale(np.concatenate(parts, axis=1))
    warm = kernel.warmup
    for row in range(3):
        ref = det.transform(z[row] * det.sigma_ + det.mu_)
        worker = det.__class__(**det.get_params()).fit()
        online = []
        for v in z[row]:
            worker._step(worker.state_, v)
            online.append(worker.state_.value)
        np.testing.assert_allclose(path[row, warm - 1 :], np.array(online)[warm - 1 :], rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(ref[warm - 1 :], np.array(online)[warm - 1 :], rtol=1e-9, atol=1e-9)


def test_genmosum_kernel_does_not_drift():
    """Cumulative sums are re-centred per chunk, so long paths stay exact."""
    det = GeneralizedMOSUM(2, 6, threshold=1.0).fit()
    kernel = det._mc_kernel()
    carry = kernel.init(1)
    z = np.full((1, 4096), 3.0)
    for _ in range(200):
        stat, carry = kernel.advance(z, carry)
    assert stat[0, -1] == pytest.approx(6 * 2.5, abs=1e-9)
