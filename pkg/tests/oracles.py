"""Brute-force definitions of the detection statistics."""

import math

from transient_cpd import segment_llr


def brute_cusum_v(ys, spec):
    """``V_n = max_{0 <= nu < n} exp(sum of llr over nu+1..n)``, with the empty-prefix floor."""
    n = len(ys)
    return max(math.exp(segment_llr(ys, spec, nu, n)) for nu in range(n))


def brute_sr(ys, spec):
    n = len(ys)
    return sum(math.exp(segment_llr(ys, spec, nu, n)) for nu in range(n))


def brute_page(ys, spec):
    n = len(ys)
    return max(0.0, max(segment_llr(ys, spec, nu, n) for nu in range(n)))


def brute_genmosum(ys, spec, l0, l1):
    """Largest centred sum over segments of length ``l0..l1``.

    At ``n > l1`` only segments ending at ``n`` count; at ``n = l1`` every
    admissible segment inside the first ``l1`` observations counts.
    """
    n = len(ys)
    c = [y - spec.mu - spec.amplitude / 2 for y in ys]
    ends = range(l0, n + 1) if n == l1 else [n]
    return max(sum(c[e - l : e]) for e in ends for l in range(l0, min(l1, e) + 1))


def brute_full_lr(ys, spec):
    n = len(ys)
    best = max(segment_llr(ys, spec, nu, end) for end in range(1, n + 1) for nu in range(end))
    return max(best, 0.0)
