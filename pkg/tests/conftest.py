"""Shared fixtures and independent reference implementations.

The reference decoder here deliberately re-implements successive
cancellation straight off the factor-graph recurrences (scalar math,
per-bit recomputation, no memoization) so the package decoders are
checked against something that shares none of their code.
"""

import math

import numpy as np
import pytest

from sscpolar import ChannelKind, channel_from_capacity, code_from_frozen, make_channel
from sscpolar.channel import LLR_CAP

# The worked N=8, rate-1/2 example used across the latency tests:
# frozen {0, 1, 2, 4}, information {3, 5, 6, 7}.
EXAMPLE8_FROZEN = np.array([1, 1, 1, 0, 1, 0, 0, 0], dtype=bool)


@pytest.fixture(scope="session")
def bec_half():
    return channel_from_capacity(ChannelKind.BEC, 0.5)


@pytest.fixture(scope="session")
def example8_code(bec_half):
    return code_from_frozen(bec_half, EXAMPLE8_FROZEN, pe=1e-3)


def _f_ref(a, b):
    t = math.tanh(a / 2.0) * math.tanh(b / 2.0)
    if abs(t) >= 1.0:
        return math.copysign(LLR_CAP, t)
    return max(-LLR_CAP, min(LLR_CAP, 2.0 * math.atanh(t)))


def _g_ref(a, b, c):
    return max(-LLR_CAP, min(LLR_CAP, a + (1.0 - 2.0 * c) * b))


def reference_sc(llr, frozen):
    """Straight-line SC over the factor graph, one frame.

    LLRs are recomputed from scratch for every bit; partial sums are
    re-derived level by level whenever a block completes.  Ties (LLR
    exactly zero) decode to bit 0.
    """
    llr = np.asarray(llr, dtype=float)
    N = llr.size
    n = N.bit_length() - 1
    assert 2 ** n == N
    beta = np.zeros((n + 1, N), dtype=np.uint8)

    def alpha(s, i):
        if s == n:
            return llr[i]
        if (i >> s) % 2 == 0:
            return _f_ref(alpha(s + 1, i), alpha(s + 1, i + (1 << s)))
        return _g_ref(alpha(s + 1, i), alpha(s + 1, i - (1 << s)),
                      float(beta[s, i - (1 << s)]))

    u = np.zeros(N, dtype=np.uint8)
    for i in range(N):
        a = alpha(0, i)
        u[i] = 0 if (frozen[i] or a >= 0.0) else 1
        beta[0, i] = u[i]
        for s in range(1, n + 1):
            blk = 1 << s
            if (i + 1) % blk:
                break
            base = i + 1 - blk
            half = blk // 2
            for j in range(base, base + half):
                beta[s, j] = beta[s - 1, j] ^ beta[s - 1, j + half]
            for j in range(base + half, base + blk):
                beta[s, j] = beta[s - 1, j]
    return u


def random_bsc():
    return make_channel(ChannelKind.BSC, 0.11)
