"""Polar code construction from Bhattacharyya-parameter evolution.

Evolves the channel reliability through n polarization levels, freezes
every position whose synthetic channel fails the error-probability
threshold, and provides the polarization diagnostics used to reason
about pruned decoding trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

import numpy as np

from .channel import (
    BmsChannel,
    ChannelKind,
    MinusRule,
    default_minus_rule,
    h2,
    make_channel,
    validate_minus_rule,
    z_minus,
    z_plus,
)

# Materializing all 2^n leaves beyond this point needs >100 MB of scratch;
# the streaming iterator and the latency-module scans stay O(n).
MAX_MATERIALIZED_N = 24

CODE_FILE_MAGIC = "polarcode v1"


@dataclass(frozen=True, eq=False)
class PolarCode:
    """A constructed polar code: frozen mask plus the channel it came from.

    frozen[i] is True when leaf i is a frozen position.  Leaf order is the
    natural factor-graph order: leaf i-1 corresponds to the transform path
    given by the binary expansion of i-1, most significant bit first, with
    bit 0 the worse branch.  No bit-reversal anywhere.
    """

    channel: BmsChannel
    n: int
    pe: float
    frozen: np.ndarray
    rule: MinusRule

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 < self.pe < 1.0:
            raise ValueError(f"pe must be in (0, 1), got {self.pe}")
        fr = np.asarray(self.frozen, dtype=bool)
        if fr.shape != (2 ** self.n,):
            raise ValueError(f"frozen mask must have length 2^{self.n}")
        object.__setattr__(self, "frozen", fr)
        validate_minus_rule(self.channel.kind, self.rule)

    @property
    def N(self) -> int:
        return 2 ** self.n

    @property
    def k(self) -> int:
        return int(self.N - int(self.frozen.sum()))

    @property
    def rate(self) -> float:
        return self.k / self.N

    @property
    def threshold(self) -> float:
        return self.pe / self.N

    @property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen)


def iter_leaf_reliabilities(channel: BmsChannel, n: int,
                            rule: Optional[MinusRule] = None) -> Iterator[float]:
    """Stream the 2^n leaf Bhattacharyya parameters in leaf order.

    Depth-first with an explicit stack: O(2^n) time, O(n) memory, so block
    lengths up to 2^27 are reachable without materializing anything.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rule = rule or default_minus_rule(channel.kind)
    validate_minus_rule(channel.kind, rule)
    stack = [(channel.z0, 0)]
    while stack:
        z, depth = stack.pop()
        if depth == n:
            yield z
            continue
        # push the better branch first so the worse branch pops first
        stack.append((z_plus(z), depth + 1))
        stack.append((z_minus(z, rule), depth + 1))


def leaf_reliabilities(channel: BmsChannel, n: int,
                       rule: Optional[MinusRule] = None) -> np.ndarray:
    """Materialized leaf Bhattacharyya parameters (breadth-first, vectorized).

    Bit-for-bit identical to the streamed order; capped at n = 24 because it
    holds full levels in memory.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > MAX_MATERIALIZED_N:
        raise ValueError(
            f"n={n} too large to materialize; use iter_leaf_reliabilities or the latency scans"
        )
    rule = rule or default_minus_rule(channel.kind)
    validate_minus_rule(channel.kind, rule)
    z = np.array([channel.z0], dtype=np.float64)
    for _ in range(n):
        nxt = np.empty(2 * z.size, dtype=np.float64)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


def build_code(channel: BmsChannel, n: int, pe: float,
               rule: Optional[MinusRule] = None) -> PolarCode:
    """Construct the polar code for (channel, N=2^n, pe).

    Position i is frozen exactly when its leaf reliability Z_i >= pe/N;
    ties freeze (information positions require strictly better channels).
    """
    if not 0.0 < pe < 1.0:
        raise ValueError(f"pe must be in (0, 1), got {pe}")
    rule = rule or default_minus_rule(channel.kind)
    z = leaf_reliabilities(channel, n, rule)
    frozen = z >= pe / (2 ** n)
    return PolarCode(channel, n, pe, frozen, rule)


def code_from_frozen(channel: BmsChannel, frozen, pe: float,
                     rule: Optional[MinusRule] = None) -> PolarCode:
    """Wrap an explicit frozen mask (e.g. a textbook example code)."""
    fr = np.asarray(frozen, dtype=bool)
    n = int(fr.size).bit_length() - 1
    if 2 ** n != fr.size:
        raise ValueError(f"frozen mask length {fr.size} is not a power of two")
    rule = rule or default_minus_rule(channel.kind)
    return PolarCode(channel, n, pe, fr, rule)


# ---------------------------------------------------------------------------
# binary entropy inverse and polarization diagnostics
# ---------------------------------------------------------------------------

def h2_inv(y: float) -> float:
    """Inverse of the binary entropy on [0, 1/2], bisected to 1e-12.

    The endpoints are returned exactly; float h2 is too flat near x = 1/2
    for bisection to pin them tighter than a few 1e-9.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"h2_inv argument must be in [0, 1], got {y}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if h2(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PolarizationStats:
    """Fraction of synthetic channels still un-polarized at level n."""

    n: int
    interval_lo: float
    interval_hi: float
    fraction_inside: float
    gamma: Optional[float] = None
    mu: Optional[float] = None


def midzone_interval(n: int, gamma: float, mu: float) -> tuple[float, float]:
    """The [2^(-2^(n*g*h)), 1 - 2^(-2^(n*g*h))] un-polarized band.

    h = h2_inv((gamma*(mu+1) - 1) / (gamma*mu)); gamma must lie strictly
    inside (1/(1+mu), 1) for the band to be defined.
    """
    if not (1.0 / (1.0 + mu)) < gamma < 1.0:
        raise ValueError(f"gamma must be in (1/(1+mu), 1) = ({1/(1+mu):.4f}, 1), got {gamma}")
    hexp = h2_inv((gamma * (mu + 1.0) - 1.0) / (gamma * mu))
    edge = 2.0 ** -(2.0 ** (n * gamma * hexp))
    return edge, 1.0 - edge


def cube_interval(N: int) -> tuple[float, float]:
    """The [1/N^3, 1 - 1/N^3] thresholds used to force Rate-0/Rate-1 nodes."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    return 1.0 / N ** 3, 1.0 - 1.0 / N ** 3


def unpolarized_fraction(channel: BmsChannel, n: int, lo: float, hi: float,
                         rule: Optional[MinusRule] = None,
                         gamma: Optional[float] = None,
                         mu: Optional[float] = None) -> PolarizationStats:
    """Fraction of level-n leaves whose reliability lies in [lo, hi]."""
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError(f"need 0 <= lo <= hi <= 1, got [{lo}, {hi}]")
    inside = 0
    for z in iter_leaf_reliabilities(channel, n, rule):
        if lo <= z <= hi:
            inside += 1
    return PolarizationStats(n, lo, hi, inside / 2 ** n, gamma, mu)


class NodeForcing(Enum):
    """Outcome of the sufficient Rate-0/Rate-1 condition at a tree node."""

    FORCED_RATE1 = "rate1"
    FORCED_RATE0 = "rate0"
    UNCONSTRAINED = "unconstrained"


def rate_forcing(z_node: float, N: int) -> NodeForcing:
    """Classify a node's reliability against the 1/N^3 forcing thresholds.

    A constituent code rooted at a node with Z <= 1/N^3 must be all
    information (Rate-1); with Z >= 1 - 1/N^3 it must be all frozen
    (Rate-0).  N is the full block length the thresholds are based on.
    """
    lo, hi = cube_interval(N)
    if z_node <= lo:
        return NodeForcing.FORCED_RATE1
    if z_node >= hi:
        return NodeForcing.FORCED_RATE0
    return NodeForcing.UNCONSTRAINED


# ---------------------------------------------------------------------------
# code file format
# ---------------------------------------------------------------------------
#   line 1: "polarcode v1"
#   line 2: "<kind> <param> <capacity> <pe> <n>"
#   line 3: frozen bitvector as hex, most significant nibble = leaves 0..3


def _frozen_to_hex(frozen: np.ndarray) -> str:
    bits = np.asarray(frozen, dtype=np.uint8)
    pad = (-bits.size) % 4
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    nibbles = bits.reshape(-1, 4) @ np.array([8, 4, 2, 1], dtype=np.uint8)
    return "".join(f"{v:x}" for v in nibbles)


def _hex_to_frozen(text: str, N: int) -> np.ndarray:
    expected = (N + 3) // 4
    if len(text) != expected:
        raise ValueError(f"frozen string has {len(text)} nibbles, expected {expected}")
    vals = np.array([int(c, 16) for c in text], dtype=np.uint8)
    bits = (vals[:, None] >> np.array([3, 2, 1, 0])) & 1
    return bits.reshape(-1)[:N].astype(bool)


def code_to_text(code: PolarCode) -> str:
    line2 = (f"{code.channel.kind.value} {code.channel.param!r} "
             f"{code.channel.capacity!r} {code.pe!r} {code.n}")
    return "\n".join([CODE_FILE_MAGIC, line2, _frozen_to_hex(code.frozen)]) + "\n"


def code_from_text(text: str) -> PolarCode:
    lines = text.strip().splitlines()
    if len(lines) != 3:
        raise ValueError(f"code file must have 3 lines, got {len(lines)}")
    if lines[0].strip() != CODE_FILE_MAGIC:
        raise ValueError(f"bad magic line {lines[0]!r}, expected {CODE_FILE_MAGIC!r}")
    fields = lines[1].split()
    if len(fields) != 5:
        raise ValueError(f"header line must have 5 fields, got {len(fields)}")
    kind = ChannelKind(fields[0])
    param = float(fields[1])
    stored_capacity = float(fields[2])
    pe = float(fields[3])
    n = int(fields[4])
    channel = make_channel(kind, param)
    if abs(channel.capacity - stored_capacity) > 1e-6:
        raise ValueError(
            f"stored capacity {stored_capacity} inconsistent with {kind.value}({param})"
        )
    frozen = _hex_to_frozen(lines[2].strip(), 2 ** n)
    return PolarCode(channel, n, pe, frozen, default_minus_rule(kind))


def save_code(code: PolarCode, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(code_to_text(code))


def load_code(path) -> PolarCode:
    with open(path, "r", encoding="ascii") as fh:
        return code_from_text(fh.read())
