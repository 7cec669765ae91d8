"""Vectorized statistic paths over blocks of standardized streams.

A kernel advances many independent streams (rows) through a chunk of
observations at once and carries whatever state the recursion needs into
the next chunk. All kernels work on standardized observations
``z = (y - mu) / sigma``; thresholds are converted to that scale by the
estimator that owns the kernel.
"""

import numpy as np
from scipy.ndimage import minimum_filter1d


def _reflected_walk(x, start):
    """Paths of ``P_n = max(P_{n-1} + x_n, 0)`` from ``P_0 = start``.

    Uses ``P_n = S_n - min(-P_0, min_{k<=n} S_k)`` for the partial sums S.
    """
    s = np.cumsum(x, axis=1)
    low = np.minimum.accumulate(s, axis=1)
    return s - np.minimum(low, -start[:, None])


class _Kernel:
    warmup = 1

    def take(self, carry, idx):
        return {k: v[idx] for k, v in carry.items()}

    def put(self, carry, idx, new):
        for k, v in new.items():
            carry[k][idx] = v


class PageKernel(_Kernel):
    """Page's reflected CUSUM on the log scale."""

    def __init__(self, amplitude):
        self.a = float(amplitude)

    def init(self, n):
        return {"p": np.zeros(n)}

    def advance(self, z, carry):
        x = self.a * (z - 0.5 * self.a)
        p = _reflected_walk(x, carry["p"])
        return p, {"p": p[:, -1].copy()}


class LogCusumKernel(_Kernel):
    """``log V_n``, which obeys ``W_n = max(W_{n-1}, 0) + llr``."""

    def __init__(self, amplitude):
        self.a = float(amplitude)

    def init(self, n):
        return {"w": np.zeros(n)}

    def advance(self, z, carry):
        x = self.a * (z - 0.5 * self.a)
        p0 = np.maximum(carry["w"], 0.0)
        p = _reflected_walk(x, p0)
        w = x.copy()
        w[:, 0] += p0
        w[:, 1:] += p[:, :-1]
        return w, {"w": w[:, -1].copy()}


class LogSRKernel(_Kernel):
    """``log R_n`` via ``R_n = e^{S_n} (R_0 + sum_{k<n} e^{-S_k})``."""

    def __init__(self, amplitude):
        self.a = float(amplitude)

    def init(self, n):
        return {"logr": np.full(n, -np.inf)}

    def advance(self, z, carry):
        x = self.a * (z - 0.5 * self.a)
        s = np.cumsum(x, axis=1)
        seq = np.empty((z.shape[0], z.shape[1] + 1))
        seq[:, 0] = carry["logr"]
        seq[:, 1] = 0.0
        seq[:, 2:] = -s[:, :-1]
        acc = np.logaddexp.accumulate(seq, axis=1)
        logr = s + acc[:, 1:]
        return logr, {"logr": logr[:, -1].copy()}


class MosumKernel(_Kernel):
    """Sum of the last ``L`` standardized observations."""

    def __init__(self, window):
        self.L = int(window)
        self.warmup = self.L

    def init(self, n):
        return {"buf": np.zeros((n, self.L))}

    def advance(self, z, carry):
        ext = np.concatenate([carry["buf"], z], axis=1)
        c = np.zeros((ext.shape[0], ext.shape[1] + 1))
        np.cumsum(ext, axis=1, out=c[:, 1:])
        stat = c[:, self.L + 1 :] - c[:, 1 : z.shape[1] + 1]
        return stat, {"buf": ext[:, -self.L :].copy()}


class GenMosumKernel(_Kernel):
    """Largest centred sum over segments of length ``l0..l1`` ending now.

    Carries the last ``l1`` cumulative sums, re-centred at every chunk so
    they do not drift. Positions before the start hold ``+inf``, which
    leaves only the lengths available so far; at step ``l1`` the value is
    the running maximum over steps ``l0..l1``.
    """

    def __init__(self, l0, l1, amplitude):
        self.l0, self.l1 = int(l0), int(l1)
        self.a = float(amplitude)
        self.warmup = self.l1

    def init(self, n):
        tail = np.full((n, self.l1), np.inf)
        tail[:, -1] = 0.0
        return {"tail": tail, "early": np.full(n, -np.inf), "n": np.zeros(n, dtype=np.int64)}

    def advance(self, z, carry):
        t = z.shape[1]
        tail = carry["tail"] - carry["tail"][:, -1:]
        full = np.concatenate([tail, np.cumsum(z - 0.5 * self.a, axis=1)], axis=1)
        span = self.l1 - self.l0 + 1
        # low[j] = min(full[j .. j+span-1]), the cumulative sums l0..l1 back
        low = minimum_filter1d(full, span, axis=1, origin=-(span // 2))[:, :t]
        stat = full[:, self.l1 :] - low
        early = carry["early"]
        n0 = int(carry["n"][0]) if carry["n"].size else self.l1
        if n0 < self.l1:
            k = self.l1 - n0  # column holding step l1
            upto = min(k, t)
            with np.errstate(invalid="ignore"):
                run = np.maximum(np.maximum.accumulate(stat[:, :upto], axis=1), early[:, None])
            early = run[:, -1].copy()
            if k <= t:
                stat[:, k - 1] = early
        return stat, {"tail": full[:, -self.l1 :].copy(), "early": early, "n": carry["n"] + t}


class FullLRKernel(_Kernel):
    """``K_n = max(K_{n-1}, W_n)`` with ``W`` the reflected log-likelihood walk."""

    def __init__(self, amplitude):
        self.a = float(amplitude)

    def init(self, n):
        return {"w": np.zeros(n), "k": np.zeros(n)}

    def advance(self, z, carry):
        x = self.a * (z - 0.5 * self.a)
        p0 = np.maximum(carry["w"], 0.0)
        p = _reflected_walk(x, p0)
        w = x.copy()
        w[:, 0] += p0
        w[:, 1:] += p[:, :-1]
        k = np.maximum(np.maximum.accumulate(w, axis=1), carry["k"][:, None])
        return k, {"w": w[:, -1].copy(), "k": k[:, -1].copy()}
