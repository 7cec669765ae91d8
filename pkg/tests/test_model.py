import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transient_cpd import (
    ChangeAt,
    GaussianChangeSpec,
    NoChange,
    TransientWindow,
    log_likelihood_ratio,
    sample_stream,
    segment_llr,
)
from transient_cpd.exceptions import ConfigurationError

finite = st.floats(-50, 50, allow_nan=False)
positive = st.floats(0.05, 20, allow_nan=False)


def test_llr_at_midpoint_is_zero():
    spec = GaussianChangeSpec(mu=2.0, amplitude=1.0, sigma=1.0)
    assert log_likelihood_ratio(2.5, spec) == 0.0


def test_llr_matches_log_density_ratio():
    from scipy.stats import norm

    spec = GaussianChangeSpec(mu=0.3, amplitude=0.7, sigma=1.9)
    y = np.linspace(-5, 5, 11)
    ref = norm.logpdf(y, 1.0, 1.9) - norm.logpdf(y, 0.3, 1.9)
    np.testing.assert_allclose(log_likelihood_ratio(y, spec), ref, atol=1e-12)


@given(finite, positive, positive, finite)
def test_llr_is_affine_and_increasing(mu, a, sigma, y):
    spec = GaussianChangeSpec(mu, a, sigma)
    lo, hi = log_likelihood_ratio(y, spec), log_likelihood_ratio(y + 1.0, spec)
    assert hi - lo == pytest.approx(a / sigma**2, rel=1e-9, abs=1e-9)


def test_segment_llr_whole_and_empty():
    spec = GaussianChangeSpec()
    ys = [1.0, 2.0, -1.0]
    assert segment_llr(ys, spec, 0, 3) == pytest.approx(sum(y - 0.5 for y in ys))
    with pytest.raises(IndexError):
        segment_llr(ys, spec, 2, 2)
    with pytest.raises(IndexError):
        segment_llr(ys, spec, 0, 4)


@settings(max_examples=50)
@given(st.lists(finite, min_size=2, max_size=30), st.data())
def test_segment_llr_is_additive(ys, data):
    spec = GaussianChangeSpec(0.0, 1.3, 0.8)
    n = len(ys)
    nu = data.draw(st.integers(0, n - 2))
    mid = data.draw(st.integers(nu + 1, n - 1))
    end = data.draw(st.integers(mid + 1, n))
    total = segment_llr(ys, spec, nu, end)
    assert total == pytest.approx(segment_llr(ys, spec, nu, mid) + segment_llr(ys, spec, mid, end), abs=1e-9)


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        GaussianChangeSpec(amplitude=0.0)
    with pytest.raises(ConfigurationError):
        GaussianChangeSpec(sigma=-1.0)
    with pytest.raises(ConfigurationError):
        TransientWindow(5, 3)
    with pytest.raises(ConfigurationError):
        TransientWindow(0, 3)
    with pytest.raises(ConfigurationError):
        ChangeAt(-1)


def test_window_lengths():
    assert list(TransientWindow(2, 4).lengths) == [2, 3, 4]
    assert TransientWindow.exact(7) == TransientWindow(7, 7)


def test_change_masks():
    assert not NoChange().mask(5).any()
    np.testing.assert_array_equal(ChangeAt(2, 2).mask(6), [0, 0, 1, 1, 0, 0])
    np.testing.assert_array_equal(ChangeAt(4).mask(6), [0, 0, 0, 0, 1, 1])
    assert ChangeAt(3, 5).end == 8 and ChangeAt(3).end is None


def test_sample_stream_reproducible_and_shifted():
    spec = GaussianChangeSpec(mu=1.0, amplitude=3.0, sigma=0.5)
    a = sample_stream(spec, ChangeAt(10, 5), 30, (7, 1))
    b = sample_stream(spec, ChangeAt(10, 5), 30, (7, 1))
    base = sample_stream(spec, NoChange(), 30, (7, 1))
    np.testing.assert_array_equal(a, b)
    np.testing.assert_allclose(a - base, 3.0 * ChangeAt(10, 5).mask(30))


def test_sample_stream_moments():
    spec = GaussianChangeSpec(mu=-2.0, amplitude=1.0, sigma=3.0)
    y = sample_stream(spec, NoChange(), 200_000, 11)
    assert abs(y.mean() + 2.0) < 0.03
    assert abs(y.std() - 3.0) < 0.03
