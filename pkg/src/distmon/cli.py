"""Command-line front end: ``distmon monitor|compare|bench-random|bench-pattern|bench-arch``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bench import (
    KINDS, BenchConfig, bench_architectures, gen_trace, rows_to_csv, run_benchmark,
)
from .decentral import Architecture
from .formula import FormulaSyntaxError, UnknownAtomError, parse_formula
from .progression import Verdict
from .simulation import (
    RunResult, TraceError, load_architecture, load_trace, run_centralised, run_decentralised,
)

EXIT = {Verdict.TOP: 0, Verdict.BOTTOM: 1, Verdict.UNKNOWN: 2}
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    """``"1..6"`` or ``"1,3,5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a..b' or a comma list, got {text!r}") from None


def _default_arch() -> Architecture:
    return Architecture.from_partition([["a"], ["b"], ["c"]])


def _arch(args) -> Architecture:
    return load_architecture(args.arch) if args.arch else _default_arch()


def _formula(args, arch: Architecture):
    if (args.formula is None) == (args.formula_file is None):
        raise UsageError("give exactly one of --formula or --formula-file")
    text = args.formula if args.formula is not None else Path(args.formula_file).read_text().strip()
    return parse_formula(text, arch.props)


def _trace(args, arch: Architecture):
    if args.trace and args.length is not None:
        raise UsageError("give either --trace or --length, not both")
    if args.trace:
        return load_trace(arch, args.trace)
    if args.length is None:
        raise UsageError("give a trace file (--trace) or a generated length (--length)")
    rng = np.random.default_rng(args.seed)
    return gen_trace(arch, args.length, args.prob, rng)


def _report(arch: Architecture, res: RunResult, mode: str) -> str:
    t = "-" if res.time is None else str(res.time)
    if mode == "central":
        return f"verdict={res.verdict.value} t={t} msgs={res.messages}"
    who = "-" if res.monitor is None else arch.components[res.monitor].name
    return f"verdict={res.verdict.value} t={t} monitor={who} msgs={res.messages}"


def _print_log(arch: Architecture, res: RunResult, mode: str, out) -> None:
    for t, row in enumerate(res.log):
        if mode == "central":
            print(f"t={t} {row}", file=out)
            continue
        for o in row:
            name = arch.components[o.state.index].name
            dest = f" -> {arch.components[o.message.receiver].name}" if o.message else ""
            print(f"t={t} {name}: {o.progressed}{dest}", file=out)


def _run(arch, spec, trace, mode: str, pad: int, verbose: bool) -> RunResult:
    if mode == "central":
        return run_centralised(arch, spec, trace, record=verbose)
    return run_decentralised(arch, spec, trace, pad, record=verbose)


def cmd_monitor(args) -> int:
    arch = _arch(args)
    spec = _formula(args, arch)
    trace = _trace(args, arch)
    pad = args.pad or 0
    res = _run(arch, spec, trace, args.mode, pad, args.verbose)
    if args.verbose:
        _print_log(arch, res, args.mode, sys.stdout)
    print(_report(arch, res, args.mode))
    return EXIT[res.verdict]


def cmd_compare(args) -> int:
    arch = _arch(args)
    spec = _formula(args, arch)
    trace = _trace(args, arch)
    central = run_centralised(arch, spec, trace, record=args.verbose)
    pad = (arch.n if args.pad is None else args.pad) if central.verdict.conclusive else 0
    decentral = run_decentralised(arch, spec, trace, pad, record=args.verbose)
    if args.verbose:
        _print_log(arch, central, "central", sys.stdout)
        _print_log(arch, decentral, "decentral", sys.stdout)
    print("central   " + _report(arch, central, "central"))
    print("decentral " + _report(arch, decentral, "decentral"))
    return EXIT[central.verdict]


def _bench_config(args, source: str, labels) -> BenchConfig:
    cfg = BenchConfig.load(args.config) if args.config else BenchConfig(source=source)
    changes = {"source": source}
    if labels is not None:
        changes["labels"] = labels
    elif cfg.source != source:
        changes["labels"] = None
    for name in ("runs", "cap", "seed", "jobs"):
        value = getattr(args, name)
        if value is not None:
            changes[name] = value
    if args.prob is not None or cfg.source != source:
        changes["prob"] = args.prob
    if args.arch:
        changes["arch"] = load_architecture(args.arch)
    return replace(cfg, **changes)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_bench_random(args) -> int:
    cfg = _bench_config(args, "random", args.sizes)
    _emit(args, rows_to_csv(run_benchmark(cfg)))
    return 0


def _kinds(values) -> tuple[str, ...] | None:
    if not values:
        return None
    out = []
    for v in values:
        out.extend(k.strip() for k in v.split(",") if k.strip())
    bad = [k for k in out if k not in KINDS]
    if bad:
        raise UsageError(f"unknown pattern(s) {bad}; choose from {', '.join(KINDS)}")
    return tuple(out)


def cmd_bench_pattern(args) -> int:
    cfg = _bench_config(args, "pattern", _kinds(args.pattern))
    _emit(args, rows_to_csv(run_benchmark(cfg)))
    return 0


def cmd_bench_arch(args) -> int:
    kinds = _kinds(args.pattern) or ("absence",)
    if len(kinds) != 1:
        raise UsageError("bench-arch takes a single --pattern")
    cfg = _bench_config(args, "pattern", kinds)
    alphabet = tuple(p.strip() for p in args.alphabet.split(",") if p.strip())
    rows = bench_architectures(kinds[0], alphabet, args.counts, cfg)
    _emit(args, rows_to_csv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="distmon", description="Centralised and decentralised LTL monitoring.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def run_flags(p):
        p.add_argument("-f", "--formula", help="LTL formula text")
        p.add_argument("--formula-file", help="file holding the formula")
        p.add_argument("--arch", help="architecture JSON (default: components a|b|c)")
        p.add_argument("--trace", help="trace file, one JSON object per line")
        p.add_argument("--length", type=int, help="generate a random trace of this length instead")
        p.add_argument("--prob", type=float, default=0.5, help="per-proposition probability for --length")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--pad", type=int, help="empty events the decentralised run may read past the trace")
        p.add_argument("-v", "--verbose", action="store_true", help="print every obligation")

    p = sub.add_parser("monitor", help="run one monitor over a trace")
    run_flags(p)
    p.add_argument("--mode", choices=("central", "decentral"), default="decentral")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("compare", help="run both modes over the same trace")
    run_flags(p)
    p.set_defaults(func=cmd_compare)

    def bench_flags(p):
        p.add_argument("--config", help="benchmark config JSON; flags override it")
        p.add_argument("--arch", help="architecture JSON (default: components a|b|c)")
        p.add_argument("--runs", type=int)
        p.add_argument("--prob", type=float)
        p.add_argument("--cap", type=int, help="trace length cap")
        p.add_argument("--seed", type=int)
        p.add_argument("--jobs", type=int)
        p.add_argument("--out", help="CSV destination (default stdout)")

    p = sub.add_parser("bench-random", help="random formulae by temporal size")
    bench_flags(p)
    p.add_argument("--sizes", type=_int_list, help="e.g. 1..6 or 1,2,4")
    p.set_defaults(func=cmd_bench_random)

    p = sub.add_parser("bench-pattern", help="specification patterns")
    bench_flags(p)
    p.add_argument("--pattern", action="append", help="pattern kind(s); default all nine")
    p.set_defaults(func=cmd_bench_pattern)

    p = sub.add_parser("bench-arch", help="one pattern over different splits of an alphabet")
    bench_flags(p)
    p.add_argument("--pattern", action="append", help="pattern kind (default absence)")
    p.add_argument("--alphabet", default="a,b,c,d,e")
    p.add_argument("--counts", type=_int_list, default=(2, 3, 4, 5), help="component counts")
    p.set_defaults(func=cmd_bench_arch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormulaSyntaxError, UnknownAtomError) as exc:
        print(f"distmon: formula error: {exc}", file=sys.stderr)
    except (UsageError, TraceError, ValueError, OSError) as exc:
        print(f"distmon: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
