"""Binary memoryless symmetric channel models.

Covers the three channel families used throughout the package (BEC, BSC,
binary-input AWGN), their Bhattacharyya parameters and capacities, the
single-step reliability transforms of channel polarization, and seeded
LLR sampling for Monte Carlo decoding runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad

# LLR magnitudes are clamped here so that arithmetic stays total:
# tanh(LLR_CAP / 2) rounds to 1.0 in float64 without producing NaN downstream.
LLR_CAP = 300.0

_BISECTION_ITERS = 200
_CAPACITY_TOL = 1e-9


class ChannelKind(str, Enum):
    BEC = "bec"
    BSC = "bsc"
    BAWGNC = "bawgnc"


# Scaling exponents of the three families: the rate gap to capacity of the
# construction closes like N^(-1/mu).  BSC's value is a conjecture.
SCALING_EXPONENT = {
    ChannelKind.BEC: 3.63,
    ChannelKind.BSC: 4.2,
    ChannelKind.BAWGNC: 4.0,
}


class MinusRule(Enum):
    """How the reliability of the worse synthetic channel is evolved.

    Both rules evaluate 2z - z^2.  EXACT_BEC declares the value exact
    (true only on the BEC); UPPER_BOUND declares it a conservative upper
    bound, which is the correct reading for every other channel family.
    """

    EXACT_BEC = "exact-bec"
    UPPER_BOUND = "upper-bound"


def default_minus_rule(kind: ChannelKind) -> MinusRule:
    return MinusRule.EXACT_BEC if kind is ChannelKind.BEC else MinusRule.UPPER_BOUND


def validate_minus_rule(kind: ChannelKind, rule: MinusRule) -> None:
    if rule is MinusRule.EXACT_BEC and kind is not ChannelKind.BEC:
        raise ValueError(f"MinusRule.EXACT_BEC is only valid for the BEC, got {kind.value}")


@dataclass(frozen=True)
class BmsChannel:
    """A BMS channel instance with its derived reliability figures.

    param is the erasure probability for the BEC, the crossover
    probability for the BSC, and the noise standard deviation (at unit
    signal energy) for the BAWGNC.  capacity and z0 are stored redundantly
    so downstream code never re-derives them.
    """

    kind: ChannelKind
    param: float
    capacity: float
    z0: float

    def __post_init__(self):
        _check_param(self.kind, self.param)

    @property
    def mu(self) -> float:
        return SCALING_EXPONENT[self.kind]


def _check_param(kind: ChannelKind, param: float) -> None:
    if not math.isfinite(param):
        raise ValueError(f"channel parameter must be finite, got {param}")
    if kind is ChannelKind.BEC and not 0.0 <= param <= 1.0:
        raise ValueError(f"BEC erasure probability must be in [0, 1], got {param}")
    if kind is ChannelKind.BSC and not 0.0 <= param <= 0.5:
        raise ValueError(f"BSC crossover probability must be in [0, 1/2], got {param}")
    if kind is ChannelKind.BAWGNC and not param > 0.0:
        raise ValueError(f"BAWGNC noise std must be positive, got {param}")


def bhattacharyya(kind: ChannelKind, param: float) -> float:
    """Bhattacharyya parameter Z = sum_y sqrt(W(y|0) W(y|1)) of the channel."""
    _check_param(kind, param)
    if kind is ChannelKind.BEC:
        return param
    if kind is ChannelKind.BSC:
        return 2.0 * math.sqrt(param * (1.0 - param))
    return math.exp(-1.0 / (2.0 * param * param))


def h2(x: float) -> float:
    """Binary entropy in bits."""
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _bawgnc_capacity(sigma: float) -> float:
    # C = 1 - E_{y ~ N(1, sigma^2)} log2(1 + exp(-2y/sigma^2)), unit signal energy.
    s2 = sigma * sigma

    def integrand(y: float) -> float:
        pdf = math.exp(-((y - 1.0) ** 2) / (2.0 * s2)) / math.sqrt(2.0 * math.pi * s2)
        return pdf * np.logaddexp(0.0, -2.0 * y / s2) / math.log(2.0)

    loss, _ = quad(integrand, -np.inf, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    return min(1.0, max(0.0, 1.0 - loss))


def capacity(kind: ChannelKind, param: float) -> float:
    """Symmetric capacity I(W) in bits per channel use."""
    _check_param(kind, param)
    if kind is ChannelKind.BEC:
        return 1.0 - param
    if kind is ChannelKind.BSC:
        return 1.0 - h2(param)
    return _bawgnc_capacity(param)


def make_channel(kind: ChannelKind, param: float) -> BmsChannel:
    return BmsChannel(kind, param, capacity(kind, param), bhattacharyya(kind, param))


def channel_from_capacity(kind: ChannelKind, target_capacity: float) -> BmsChannel:
    """Find the channel of the given kind whose capacity matches the target.

    Bisection on the parameter; capacity is strictly monotone (decreasing)
    in the parameter for all three families.

    Raises
    ------
    ValueError
        If the target capacity is not strictly inside (0, 1).
    ArithmeticError
        If bisection has not converged to 1e-9 after 200 iterations.
    """
    if not 0.0 < target_capacity < 1.0:
        raise ValueError(f"target capacity must be in (0, 1), got {target_capacity}")

    if kind is ChannelKind.BEC:
        return make_channel(kind, 1.0 - target_capacity)

    if kind is ChannelKind.BSC:
        lo, hi = 0.0, 0.5
    else:
        lo, hi = 1e-6, 2.0
        while _bawgnc_capacity(hi) > target_capacity:
            hi *= 2.0
            if hi > 1e6:
                raise ArithmeticError("BAWGNC capacity bisection failed to bracket target")

    mid = 0.5 * (lo + hi)
    for _ in range(_BISECTION_ITERS):
        mid = 0.5 * (lo + hi)
        c = capacity(kind, mid)
        if abs(c - target_capacity) <= _CAPACITY_TOL:
            return make_channel(kind, mid)
        if c > target_capacity:
            lo = mid
        else:
            hi = mid
    if abs(capacity(kind, mid) - target_capacity) <= _CAPACITY_TOL:
        return make_channel(kind, mid)
    raise ArithmeticError(
        f"capacity bisection did not converge for {kind.value} target {target_capacity}"
    )


def z_minus(z: float, rule: MinusRule = MinusRule.UPPER_BOUND) -> float:
    """Reliability of the worse synthetic channel: 2z - z^2.

    Exact on the BEC; a valid upper bound otherwise, which keeps the
    construction's error guarantee conservative.
    """
    return 2.0 * z - z * z


def z_plus(z: float) -> float:
    """Reliability of the better synthetic channel: z^2 (exact for all BMS)."""
    return z * z


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def bsc_llr_magnitude(p: float) -> float:
    if p <= 0.0:
        return LLR_CAP
    return min(LLR_CAP, math.log((1.0 - p) / p))


def sample_llrs(channel: BmsChannel, codeword: np.ndarray, seed) -> np.ndarray:
    """Transmit a codeword and return the channel-output LLR vector.

    Deterministic for a fixed seed.  BEC outputs are +/-LLR_CAP with 0 on
    erasure; BSC outputs are +/-log((1-p)/p); BAWGNC outputs are 2y/sigma^2
    for y = (1 - 2x) + noise.  Positive LLR favors bit 0.
    """
    rng = _as_generator(seed)
    x = np.asarray(codeword, dtype=np.uint8)
    if x.ndim != 1:
        raise ValueError("codeword must be a 1-D bit vector")

    if channel.kind is ChannelKind.BEC:
        llr = np.where(x == 0, LLR_CAP, -LLR_CAP)
        llr[rng.random(x.shape) < channel.param] = 0.0
        return llr

    if channel.kind is ChannelKind.BSC:
        mag = bsc_llr_magnitude(channel.param)
        y = x ^ (rng.random(x.shape) < channel.param)
        return np.where(y == 0, mag, -mag)

    sigma = channel.param
    y = (1.0 - 2.0 * x.astype(float)) + sigma * rng.standard_normal(x.shape)
    return np.clip(2.0 * y / (sigma * sigma), -LLR_CAP, LLR_CAP)
