"""Experiment sweeps over (channel, capacity, error target, n, PE policy).

Three presets mirror the package's standard latency-scaling plots:

* preset 6 - normalized fully-serial latency (L/N vs log2 log2 N) of the
  pruned decoder against the unpruned reference, per channel family;
* preset 7 - log2 latency vs log2 N for a ladder of PE-count policies on
  a capacity-1/2 BEC;
* preset 8 - smallest PE count whose latency stays within a factor of the
  fully-parallel implementation, same channel.

All sweeps are deterministic; rerunning a grid reproduces the CSV byte
for byte.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .channel import ChannelKind, SCALING_EXPONENT, channel_from_capacity
from .latency import min_p_within_factor, scan_edge_profile, ssc_latency

POLICIES = ("half", "sqrt", "invmu", "eighth", "one")

# p_policy value marking the unpruned-decoder reference rows in preset 6
SC_REFERENCE = "sc"

DEFAULT_CAPACITIES = (0.1, 0.5, 0.9)
DEFAULT_ERROR_TARGETS = (1e-3, 1e-10)
MAX_SWEEP_N = 27

CSV_HEADER = "channel,capacity,pe,n,log2N,p_policy,P,latency,latency_norm,log2_latency"


@dataclass(frozen=True)
class SweepRecord:
    """One grid point of an experiment sweep."""

    channel: str
    capacity: float
    pe: float
    n: int
    p_policy: str
    P: int
    latency: int

    @property
    def log2N(self) -> int:
        return self.n

    @property
    def latency_norm(self) -> float:
        return self.latency / 2 ** self.n

    @property
    def log2_latency(self) -> float:
        return math.log2(self.latency) if self.latency > 0 else float("-inf")

    @property
    def log2P(self) -> float:
        return math.log2(self.P)

    @property
    def log2log2N(self) -> float:
        return math.log2(self.n)


def realize_policy(policy: str, n: int, mu: float = SCALING_EXPONENT[ChannelKind.BEC]) -> int:
    """Map a PE policy to a concrete processing-element count at block size 2^n.

    Fractional targets are truncated toward zero (with a floor of 1 and a
    ceiling of N/2); truncation is what reproduces the reference latency
    tables point for point, where round-half-up does not.
    """
    N = 2 ** n
    if policy == "half":
        return max(1, N // 2)
    if policy == "one":
        return 1
    if policy == "sqrt":
        x = math.sqrt(N)
    elif policy == "invmu":
        x = N ** (1.0 / mu)
    elif policy == "eighth":
        x = N ** 0.125
    else:
        raise ValueError(f"unknown policy {policy!r}")
    return max(1, min(int(x), N // 2))


def _check_n_range(n_min: int, n_max: int) -> range:
    if not 1 <= n_min <= n_max <= MAX_SWEEP_N:
        raise ValueError(f"need 1 <= n_min <= n_max <= {MAX_SWEEP_N}, got [{n_min}, {n_max}]")
    return range(n_min, n_max + 1)


def _pmap(fn, items: Sequence, threads: Optional[int]):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _sort_records(records: list[SweepRecord]) -> list[SweepRecord]:
    order = {name: i for i, name in enumerate(POLICIES + (SC_REFERENCE,))}
    return sorted(records, key=lambda r: (r.channel, r.capacity, r.pe, r.n,
                                          order.get(r.p_policy, 99), r.p_policy))


def run_serial_sweep(kinds: Iterable[ChannelKind] = tuple(ChannelKind),
                     capacities: Iterable[float] = DEFAULT_CAPACITIES,
                     error_targets: Iterable[float] = DEFAULT_ERROR_TARGETS,
                     n_max: int = 22, n_min: int = 4,
                     threads: Optional[int] = None) -> list[SweepRecord]:
    """Preset 6: fully-serial (P=1) pruned-decoder latency over the grid.

    Emits one record per (kind, capacity, pe, n) plus, per channel kind,
    an unpruned reference curve (p_policy='sc', capacity=pe=0) whose
    normalized latency is exactly n.
    """
    ns = _check_n_range(n_min, n_max)
    kinds = tuple(kinds)
    curves = [(kind, cap, pe) for kind in kinds
              for cap in capacities for pe in error_targets]

    def one_curve(curve) -> list[SweepRecord]:
        kind, cap, pe = curve
        channel = channel_from_capacity(kind, cap)
        out = []
        for n in ns:
            latency = ssc_latency(scan_edge_profile(channel, n, pe), 1)
            out.append(SweepRecord(kind.value, cap, pe, n, "one", 1, latency))
        return out

    records = [rec for curve in _pmap(one_curve, curves, threads) for rec in curve]
    for kind in kinds:
        for n in ns:
            records.append(SweepRecord(kind.value, 0.0, 0.0, n, SC_REFERENCE, 1, n * 2 ** n))
    return _sort_records(records)


def run_policy_sweep(n_max: int = 27, n_min: int = 4,
                     capacity: float = 0.5, pe: float = 1e-3,
                     policies: Sequence[str] = POLICIES,
                     threads: Optional[int] = None) -> list[SweepRecord]:
    """Preset 7: latency ladder over PE policies, BEC at the given capacity."""
    ns = _check_n_range(n_min, n_max)
    channel = channel_from_capacity(ChannelKind.BEC, capacity)
    mu = SCALING_EXPONENT[ChannelKind.BEC]

    def one_n(n: int) -> list[SweepRecord]:
        profile = scan_edge_profile(channel, n, pe)
        out = []
        for policy in policies:
            P = realize_policy(policy, n, mu)
            out.append(SweepRecord(ChannelKind.BEC.value, capacity, pe, n,
                                   policy, P, ssc_latency(profile, P)))
        return out

    records = [rec for group in _pmap(one_n, list(ns), threads) for rec in group]
    return _sort_records(records)


def run_parallelism_sweep(n_max: int = 27, n_min: int = 4, factor: float = 1.01,
                          capacity: float = 0.5, pe: float = 1e-3,
                          threads: Optional[int] = None) -> list[SweepRecord]:
    """Preset 8: smallest P within `factor` of the fully-parallel latency."""
    if factor < 1.0:
        raise ValueError(f"factor must be >= 1, got {factor}")
    ns = _check_n_range(n_min, n_max)
    channel = channel_from_capacity(ChannelKind.BEC, capacity)

    def one_n(n: int) -> SweepRecord:
        profile = scan_edge_profile(channel, n, pe)
        P = min_p_within_factor(profile, factor)
        return SweepRecord(ChannelKind.BEC.value, capacity, pe, n,
                           "fixed", P, ssc_latency(profile, P))

    return _sort_records(_pmap(one_n, list(ns), threads))


SWEEPS = {6: run_serial_sweep, 7: run_policy_sweep, 8: run_parallelism_sweep}


# ---------------------------------------------------------------------------
# slope fitting and CSV emission
# ---------------------------------------------------------------------------

_FIELDS = {
    "n": lambda r: float(r.n),
    "log2N": lambda r: float(r.n),
    "latency": lambda r: float(r.latency),
    "latency_norm": lambda r: r.latency_norm,
    "log2_latency": lambda r: r.log2_latency,
    "log2P": lambda r: r.log2P,
    "log2log2N": lambda r: r.log2log2N,
}


def field_values(records: Sequence[SweepRecord], name: str) -> np.ndarray:
    try:
        getter = _FIELDS[name]
    except KeyError:
        raise ValueError(f"unknown field {name!r}; one of {sorted(_FIELDS)}") from None
    return np.array([getter(r) for r in records], dtype=float)


@dataclass(frozen=True)
class SlopeFit:
    x_name: str
    y_name: str
    window: int
    slope: float
    intercept: float
    residual: float


def fit_slope(records: Sequence[SweepRecord], x_field: str, y_field: str,
              window: int) -> SlopeFit:
    """Ordinary least squares over the last `window` records."""
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    if len(records) < window:
        raise ValueError(f"need at least {window} records, got {len(records)}")
    tail = records[-window:]
    xs = field_values(tail, x_field)
    ys = field_values(tail, y_field)
    if not np.all(np.diff(xs) > 0):
        raise ValueError(f"{x_field} must be strictly increasing over the window")
    xm, ym = xs.mean(), ys.mean()
    slope = float(((xs - xm) * (ys - ym)).sum() / ((xs - xm) ** 2).sum())
    intercept = float(ym - slope * xm)
    residual = float(((ys - (slope * xs + intercept)) ** 2).sum())
    return SlopeFit(x_field, y_field, window, slope, intercept, residual)


def _fmt(x: float) -> str:
    return format(x, ".6g")


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join([
            r.channel, _fmt(r.capacity), _fmt(r.pe), str(r.n), str(r.log2N),
            r.p_policy, str(r.P), str(r.latency), _fmt(r.latency_norm),
            _fmt(r.log2_latency),
        ]))
    return "\n".join(lines) + "\n"


def write_csv(records: Sequence[SweepRecord], path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(records_to_csv(records))
