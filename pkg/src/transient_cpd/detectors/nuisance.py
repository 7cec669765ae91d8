"""Offline-window statistics for transients with nuisance parameters.

When ``mu`` (and possibly ``A``) must be estimated from the window itself
the statistics lose their recursive form, so they are computed in batch
over a complete window of ``n`` observations.
"""

import numpy as np

from .._validation import check_positive, check_stream
from ..exceptions import ConfigurationError


def batch_nuisance_stats(ys, window, A=None):
    """Maxima ``Z1``, ``Z2``, ``Z3`` over all segments ``(nu, nu + l]``.

    Parameters
    ----------
    ys : array-like of shape (n,)
        The window of observations; requires ``n >= l1``.
    window : TransientWindow
        Admissible segment lengths ``l0 <= l <= l1``.
    A : float, optional
        Known shift. ``Z1`` (``mu`` replaced by the sample mean) and ``Z2``
        (the mean averaged over both hypotheses) need it; they are ``None``
        when ``A`` is not given.

    Returns
    -------
    dict
        ``{"Z1": float or None, "Z2": float or None, "Z3": float}``. ``Z3``
        is the standardized segment-mean contrast with unknown ``mu`` and
        ``A``; the length ``l = n`` is skipped there since its variance
        vanishes, and ``Z3`` is ``-inf`` when no other length is admissible.
    """
    y = check_stream(ys, name="ys")
    n = y.shape[0]
    if n < window.l1:
        raise ConfigurationError(f"need at least l1={window.l1} observations; got {n}")
    if A is not None:
        check_positive(A, "A")
    mu_hat = y.mean()
    c = np.concatenate([[0.0], np.cumsum(y - mu_hat)])
    z1 = z2 = None if A is None else -np.inf
    z3 = -np.inf
    for l in window.lengths:
        seg = c[l:] - c[:-l]  # sums over (nu, nu + l], nu = 0..n-l
        best = seg.max()
        if A is not None:
            z1 = max(z1, A * (best - 0.5 * A * l))
            z2 = max(z2, A * (best - 0.5 * A * l * (1.0 - l / n)))
        if l < n:
            z3 = max(z3, best / np.sqrt(l * (1.0 - l / n)))
    return {
        "Z1": None if z1 is None else float(z1),
        "Z2": None if z2 is None else float(z2),
        "Z3": float(z3),
    }
