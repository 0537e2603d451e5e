"""Pruned decoding trees and exact decoder latency under P processing elements.

Latency is modeled as in semi-parallel decoder schedules: the edge entering
a tree node at level s costs ceil(2^s / P) time steps, and a decoder's
latency is the sum of edge costs over its (possibly pruned) decoding tree.
Everything in this module is exact integer arithmetic; no floating point
touches the latency path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .channel import BmsChannel, MinusRule, default_minus_rule, z_minus, z_plus
from .construct import PolarCode


class NodeKind(IntEnum):
    RATE0 = 0   # every leaf below is frozen
    RATE1 = 1   # every leaf below is information
    MIXED = 2


@dataclass(frozen=True)
class SscNode:
    """One node of the pruned decoding tree.

    level counts from the leaves (level 0) up to the root (level n).
    Rate-0 and Rate-1 nodes are pruned: they never carry children.
    z is the node's synthetic-channel reliability, kept for diagnostics.
    """

    level: int
    kind: NodeKind
    z: float
    children: tuple = ()

    def __post_init__(self):
        if self.kind is NodeKind.MIXED and len(self.children) != 2:
            raise ValueError("mixed nodes must have exactly two children")
        if self.kind is not NodeKind.MIXED and self.children:
            raise ValueError("rate-0/rate-1 nodes are pruned and carry no children")


@dataclass(frozen=True)
class SscTree:
    root: SscNode
    n: int

    def nodes(self) -> Iterator[SscNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)

    def node_count(self) -> int:
        return sum(1 for _ in self.nodes())

    def edge_profile(self) -> list[int]:
        """Count of tree edges entering each level s = 0 .. n-1."""
        prof = [0] * self.n
        for node in self.nodes():
            if node.kind is NodeKind.MIXED:
                prof[node.level - 1] += 2
        return prof


ProfileLike = Union[Sequence[int], SscTree, PolarCode]


def decoding_weight(s: int, P: int) -> int:
    """Time steps charged to an edge entering a node at level s: ceil(2^s / P)."""
    if s < 0:
        raise ValueError(f"level must be >= 0, got {s}")
    if P < 1:
        raise ValueError(f"P must be a positive integer, got {P}")
    return (2 ** s + P - 1) // P


def build_ssc_tree(code: PolarCode) -> SscTree:
    """Classify every node of the code's decoding tree and prune pure subtrees.

    Single pass over the frozen mask with O(1) range classification via a
    prefix-sum table; only mixed nodes recurse, so the work is proportional
    to the pruned tree, not to N.
    """
    frozen = code.frozen
    prefix = np.concatenate([[0], np.cumsum(frozen, dtype=np.int64)])
    z0 = code.channel.z0
    rule = code.rule

    def rec(lo: int, hi: int, level: int, z: float) -> SscNode:
        count = int(prefix[hi] - prefix[lo])
        if count == hi - lo:
            return SscNode(level, NodeKind.RATE0, z)
        if count == 0:
            return SscNode(level, NodeKind.RATE1, z)
        mid = (lo + hi) // 2
        left = rec(lo, mid, level - 1, z_minus(z, rule))
        right = rec(mid, hi, level - 1, z_plus(z))
        return SscNode(level, NodeKind.MIXED, z, (left, right))

    return SscTree(rec(0, code.N, code.n, z0), code.n)


# ---------------------------------------------------------------------------
# streaming classification (no frozen mask in memory, O(n) space)
# ---------------------------------------------------------------------------

def _classify(z: float, s: int, threshold: float, rule: MinusRule) -> NodeKind:
    # Rate-1 iff the worst leaf below, reached by the all-minus path, stays
    # under the freezing threshold; the minus transform is monotone increasing
    # so the check can stop early once it crosses.
    y = z
    ok = True
    for _ in range(s):
        if y >= threshold:
            ok = False
            break
        y = z_minus(y, rule)
    if ok and y < threshold:
        return NodeKind.RATE1
    # Rate-0 iff the best leaf, reached by the all-plus path, is still frozen;
    # squaring is monotone decreasing so it too stops early.
    y = z
    ok = True
    for _ in range(s):
        if y < threshold:
            ok = False
            break
        y = z_plus(y)
    if ok and y >= threshold:
        return NodeKind.RATE0
    return NodeKind.MIXED


def iter_pruned_nodes(channel: BmsChannel, n: int, pe: float,
                      rule: Optional[MinusRule] = None) -> Iterator[tuple[float, int, NodeKind]]:
    """Stream (z, level, kind) over every node of the pruned decoding tree."""
    rule = rule or default_minus_rule(channel.kind)
    threshold = pe / 2 ** n
    stack = [(channel.z0, n)]
    while stack:
        z, s = stack.pop()
        kind = _classify(z, s, threshold, rule)
        yield z, s, kind
        if kind is NodeKind.MIXED:
            stack.append((z_plus(z), s - 1))
            stack.append((z_minus(z, rule), s - 1))


def scan_edge_profile(channel: BmsChannel, n: int, pe: float,
                      rule: Optional[MinusRule] = None) -> list[int]:
    """Edge profile of the pruned tree for (channel, 2^n, pe), streamed.

    Equivalent to build_ssc_tree(build_code(...)).edge_profile() but never
    materializes the code, so it runs at n = 27 in O(n) memory.
    """
    prof = [0] * n
    for _z, s, kind in iter_pruned_nodes(channel, n, pe, rule):
        if kind is NodeKind.MIXED:
            prof[s - 1] += 2
    return prof


def _coerce_profile(obj: ProfileLike) -> list[int]:
    if isinstance(obj, PolarCode):
        return build_ssc_tree(obj).edge_profile()
    if isinstance(obj, SscTree):
        return obj.edge_profile()
    return list(obj)


# ---------------------------------------------------------------------------
# latencies
# ---------------------------------------------------------------------------

def ssc_latency(tree: ProfileLike, P: int) -> int:
    """Latency of the pruned decoder: sum of decoding weights over its edges.

    A root that is itself Rate-0 or Rate-1 has no edges and costs 0.
    """
    prof = _coerce_profile(tree)
    if P < 1:
        raise ValueError(f"P must be a positive integer, got {P}")
    return sum(count * decoding_weight(s, P) for s, count in enumerate(prof))


def sc_latency_tree(n: int, P: int) -> int:
    """Latency of the unpruned decoder: sum over the full tree's edges."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if P < 1:
        raise ValueError(f"P must be a positive integer, got {P}")
    return sum(2 ** (n - s) * decoding_weight(s, P) for s in range(n))


def sc_latency_closed_form(N: int, P: int) -> int:
    """Closed form 2N + (N/P) log2(N/(4P)) for power-of-two N and P <= N/2."""
    if N < 2 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    if P < 1 or P & (P - 1):
        raise ValueError(f"P must be a power of two >= 1, got {P}")
    if P > N // 2:
        raise ValueError(f"P must be <= N/2, got P={P}, N={N}")
    n = N.bit_length() - 1
    p = P.bit_length() - 1
    return 2 * N + (N // P) * (n - 2 - p)


def latency_upper_bound(N: int, P: int, mu: float, c: float, eps: float) -> float:
    """Evaluate c*N^(1-1/mu) + (2+eps)*(N/P)*log2 log2 (N/P).

    The double logarithm requires N/P > 1; at N/P = 2 the second term is
    exactly zero, which covers the fully-parallel operating point.
    """
    if N < 2 or P < 1:
        raise ValueError(f"need N >= 2 and P >= 1, got N={N}, P={P}")
    ratio = N / P
    inner = math.log2(ratio)
    if inner <= 0.0:
        raise ValueError(f"log2(log2(N/P)) undefined for N/P = {ratio}")
    second = 0.0 if inner == 1.0 else (2.0 + eps) * ratio * math.log2(inner)
    return c * N ** (1.0 - 1.0 / mu) + second


def serial_latency_estimate(N: int, eps: float = 0.0) -> float:
    """The fully-serial asymptote (2+eps) * N * log2 log2 N."""
    if N < 4:
        raise ValueError(f"N must be >= 4, got {N}")
    return (2.0 + eps) * N * math.log2(math.log2(N))


def matched_parallelism(N: int, mu: float) -> int:
    """N^(1/mu), the smallest PE count that keeps fully-parallel scaling."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    return max(1, int(N ** (1.0 / mu)))


def min_p_within_factor(tree: ProfileLike, factor: float) -> int:
    """Smallest integer P whose latency is within `factor` of fully parallel.

    Binary search over P in [1, N/2], valid because the latency is monotone
    non-increasing in P.  The fully-parallel reference is P = N/2.
    """
    if factor < 1.0:
        raise ValueError(f"factor must be >= 1, got {factor}")
    prof = _coerce_profile(tree)
    n = len(prof)
    half = max(1, 2 ** n // 2)
    target = factor * ssc_latency(prof, half)
    lo, hi = 1, half
    while lo < hi:
        mid = (lo + hi) // 2
        if ssc_latency(prof, mid) <= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class LatencyReport:
    """Exact time-step latencies of one code at one PE budget."""

    n: int
    N: int
    P: int
    sc_tree: int
    sc_closed: Optional[int]
    ssc: int
    normalized: float


def latency_report(code: ProfileLike, P: int, n: Optional[int] = None) -> LatencyReport:
    """Assemble the standard latency numbers for a code (or edge profile)."""
    if P < 1:
        raise ValueError(f"P must be a positive integer, got {P}")
    prof = _coerce_profile(code)
    if n is None:
        n = len(prof)
    N = 2 ** n
    closed = None
    if P & (P - 1) == 0 and 1 <= P <= N // 2:
        closed = sc_latency_closed_form(N, P)
    ssc = ssc_latency(prof, P)
    return LatencyReport(n, N, P, sc_latency_tree(n, P), closed, ssc, ssc / N)
