"""Command-line interface: construct, latency, simulate, sweep, bound.

Exit codes: 0 on success, 2 on usage or validation failure, 3 on I/O
failure.  Every subcommand is deterministic given its full flag set
(including --seed).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Optional

from . import experiments
from .channel import (
    BmsChannel,
    ChannelKind,
    SCALING_EXPONENT,
    channel_from_capacity,
    make_channel,
)
from .codec import sc_ssc_agreement
from .construct import MAX_MATERIALIZED_N, build_code, load_code, save_code
from .experiments import MAX_SWEEP_N, SweepRecord, realize_policy
from .latency import latency_report, latency_upper_bound, scan_edge_profile
from .svgplot import Series, render_gnuplot, render_line_plot


class CliError(ValueError):
    """Validation failure that maps to exit code 2."""


def _channel_from_args(args) -> BmsChannel:
    if args.channel is None:
        raise CliError("--channel is required (or use --code)")
    kind = ChannelKind(args.channel)
    if (args.capacity is None) == (getattr(args, "param", None) is None):
        raise CliError("exactly one of --capacity or --param is required")
    if args.capacity is not None:
        if not 0.0 < args.capacity < 1.0:
            raise CliError(f"--capacity must be in (0, 1), got {args.capacity}")
        return channel_from_capacity(kind, args.capacity)
    try:
        return make_channel(kind, args.param)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _check_pe(pe: Optional[float]) -> float:
    if pe is None:
        raise CliError("--pe is required")
    if not 0.0 < pe < 1.0:
        raise CliError(f"--pe must be in (0, 1), got {pe}")
    return pe


def _check_n(n: Optional[int], cap: int = MAX_SWEEP_N) -> int:
    if n is None:
        raise CliError("--n is required")
    if not 1 <= n <= cap:
        raise CliError(f"--n must be in [1, {cap}], got {n}")
    return n


def cmd_construct(args) -> int:
    channel = _channel_from_args(args)
    pe = _check_pe(args.pe)
    n = _check_n(args.n, cap=MAX_MATERIALIZED_N)
    if args.out is None:
        raise CliError("--out is required")
    code = build_code(channel, n, pe)
    save_code(code, args.out)
    print(f"N={code.N}")
    print(f"k={code.k}")
    print(f"frozen={code.N - code.k}")
    print(f"rate={code.rate:.6g}")
    print(f"out={args.out}")
    return 0


def _resolve_p(args, n: int, kind: ChannelKind) -> int:
    has_p = args.p is not None
    has_policy = args.policy is not None
    if has_p == has_policy:
        raise CliError("exactly one of --p or --policy is required")
    if has_p:
        if args.p < 1:
            raise CliError(f"--p must be >= 1, got {args.p}")
        return args.p
    mu = args.mu if args.mu is not None else SCALING_EXPONENT[kind]
    return realize_policy(args.policy, n, mu)


def cmd_latency(args) -> int:
    if args.code is not None:
        code = load_code(args.code)
        profile = code  # latency helpers accept a PolarCode directly
        n, kind = code.n, code.channel.kind
    else:
        channel = _channel_from_args(args)
        pe = _check_pe(args.pe)
        n = _check_n(args.n)
        kind = channel.kind
        profile = scan_edge_profile(channel, n, pe)
    P = _resolve_p(args, n, kind)
    report = latency_report(profile, P, n=n)
    print(f"n={report.n}")
    print(f"N={report.N}")
    print(f"P={report.P}")
    print(f"sc_tree={report.sc_tree}")
    print(f"sc_closed={report.sc_closed if report.sc_closed is not None else 'na'}")
    print(f"ssc={report.ssc}")
    print(f"normalized={report.normalized:.6g}")
    return 0


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise CliError(f"--trials must be >= 1, got {args.trials}")
    if args.code is not None:
        code = load_code(args.code)
        channel = code.channel
    else:
        channel = _channel_from_args(args)
        pe = _check_pe(args.pe)
        n = _check_n(args.n, cap=MAX_MATERIALIZED_N)
        code = build_code(channel, n, pe)
    agree, trials, fer = sc_ssc_agreement(code, channel, args.trials, args.seed)
    print(f"trials={trials}")
    print(f"agree={agree}/{trials}")
    print(f"fer={fer:.6g}")
    print(f"seed={args.seed}")
    return 0


def _sweep_series(fig: int, records: list[SweepRecord]) -> tuple[list[Series], str, str]:
    if fig == 6:
        series = []
        curves: dict[tuple, list[SweepRecord]] = {}
        for r in records:
            curves.setdefault((r.channel, r.capacity, r.pe, r.p_policy), []).append(r)
        for (kind, cap, pe, policy), recs in sorted(curves.items()):
            recs = sorted(recs, key=lambda r: r.n)
            label = (f"{kind} SC reference" if policy == experiments.SC_REFERENCE
                     else f"{kind} I={cap:g} pe={pe:g}")
            series.append(Series(label, [r.log2log2N for r in recs],
                                 [r.latency_norm for r in recs]))
        return series, "log2 log2 N", "latency / N"
    if fig == 7:
        series = []
        for policy in experiments.POLICIES:
            recs = sorted([r for r in records if r.p_policy == policy], key=lambda r: r.n)
            series.append(Series(f"P policy {policy}", [r.n for r in recs],
                                 [r.log2_latency for r in recs]))
        return series, "log2 N", "log2 latency"
    recs = sorted(records, key=lambda r: r.n)
    return ([Series("min P within factor", [r.n for r in recs], [r.log2P for r in recs])],
            "log2 N", "log2 P")


def cmd_sweep(args) -> int:
    if args.out is None:
        raise CliError("--out is required")
    fig = args.figure
    threads = args.threads
    if fig == 6:
        kinds = [ChannelKind(args.channel)] if args.channel else tuple(ChannelKind)
        n_max = args.nmax if args.nmax is not None else 22
        records = experiments.run_serial_sweep(kinds=kinds, n_max=n_max, threads=threads)
    elif fig == 7:
        n_max = args.nmax if args.nmax is not None else MAX_SWEEP_N
        records = experiments.run_policy_sweep(n_max=n_max, threads=threads)
    else:
        if args.factor < 1.0:
            raise CliError(f"--factor must be >= 1, got {args.factor}")
        n_max = args.nmax if args.nmax is not None else MAX_SWEEP_N
        records = experiments.run_parallelism_sweep(n_max=n_max, factor=args.factor,
                                                    threads=threads)
    experiments.write_csv(records, args.out)
    print(f"rows={len(records)}")
    print(f"out={args.out}")
    if args.svg or args.gnuplot:
        series, x_label, y_label = _sweep_series(fig, records)
        if args.svg:
            with open(args.svg, "w", encoding="utf-8") as fh:
                fh.write(render_line_plot(series, x_label, y_label,
                                          title=f"sweep preset {fig}"))
            print(f"svg={args.svg}")
        if args.gnuplot:
            with open(args.gnuplot, "w", encoding="utf-8") as fh:
                fh.write(render_gnuplot(series, x_label, y_label,
                                        title=f"sweep preset {fig}"))
            print(f"gnuplot={args.gnuplot}")
    return 0


def cmd_bound(args) -> int:
    if args.c <= 0.0:
        raise CliError(f"--c must be positive, got {args.c}")
    if args.eps < 0.0:
        raise CliError(f"--eps must be >= 0, got {args.eps}")
    mu = args.mu if args.mu is not None else SCALING_EXPONENT[ChannelKind.BEC]
    if args.n is None and args.nmax is None:
        raise CliError("--n or --nmax is required")
    n_lo = args.n if args.n is not None else 4
    n_hi = args.nmax if args.nmax is not None else n_lo
    if n_hi < n_lo:
        raise CliError(f"--nmax must be >= --n, got {n_hi} < {n_lo}")
    for n in range(n_lo, n_hi + 1):
        _check_n(n)
        N = 2 ** n
        P = _resolve_p(args, n, ChannelKind.BEC)
        try:
            value = latency_upper_bound(N, P, mu, args.c, args.eps)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        print(f"n={n} N={N} P={P} bound={value:.6g} log2_bound={math.log2(value):.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sscpolar",
        description="Polar code construction, SC/SSC decoding simulation, and "
                    "exact decoder latency under P processing elements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_channel_flags(p, with_code=False):
        p.add_argument("--channel", choices=[k.value for k in ChannelKind])
        p.add_argument("--capacity", type=float)
        p.add_argument("--param", type=float)
        p.add_argument("--pe", type=float)
        p.add_argument("--n", type=int)
        if with_code:
            p.add_argument("--code", help="read the code from a code file instead")

    p = sub.add_parser("construct", help="construct a code and write its code file")
    add_channel_flags(p)
    p.add_argument("--out", required=False)

    p = sub.add_parser("latency", help="exact decoder latency for a code and PE count")
    add_channel_flags(p, with_code=True)
    p.add_argument("--p", type=int)
    p.add_argument("--policy", choices=experiments.POLICIES)
    p.add_argument("--mu", type=float)

    p = sub.add_parser("simulate", help="SC/SSC agreement and frame error rate")
    add_channel_flags(p, with_code=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=1)

    p = sub.add_parser("sweep", help="run an experiment preset and write CSV")
    p.add_argument("--figure", type=int, choices=(6, 7, 8), required=True)
    p.add_argument("--channel", choices=[k.value for k in ChannelKind],
                   help="restrict preset 6 to one channel family")
    p.add_argument("--nmax", type=int)
    p.add_argument("--factor", type=float, default=1.01)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--gnuplot")
    p.add_argument("--threads", type=int, default=os.cpu_count())

    p = sub.add_parser("bound", help="evaluate the pruned-latency upper bound curve")
    p.add_argument("--n", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--policy", choices=experiments.POLICIES)
    p.add_argument("--mu", type=float)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.5)

    return parser


_COMMANDS = {
    "construct": cmd_construct,
    "latency": cmd_latency,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "bound": cmd_bound,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
