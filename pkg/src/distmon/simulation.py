"""Synchronous-bus orchestration of local monitors and the centralised baseline."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .decentral import (
    Architecture, Component, InvariantViolation, LocalMonitorState, Message,
    monitor_step,
)
from .formula import Formula, is_past_free, props_of, simplify
from .progression import Verdict, progress_event


class TraceError(ValueError):
    pass


class GlobalTrace:
    """Per-component local traces of equal length.

    Events are stored as integer codes over ``arch.props`` (bit k set when the
    k-th proposition holds), which keeps randomly generated traces cheap;
    local and global events are decoded on demand.
    """

    def __init__(self, arch: Architecture, codes: Sequence[int] | np.ndarray):
        self.arch = arch
        self._codes = [int(c) for c in codes]
        self._props = arch.props
        self._bit = {p: 1 << k for k, p in enumerate(self._props)}
        self._masks = [sum(self._bit[p] for p in c.props) for c in arch.components]
        self._decoded: dict[int, frozenset] = {}

    @classmethod
    def from_local(cls, arch: Architecture, local: Sequence[Sequence[Iterable[str]]]) -> "GlobalTrace":
        """Build from one local trace per component (in component order)."""
        if len(local) != arch.n:
            raise TraceError(f"expected {arch.n} local traces, got {len(local)}")
        lengths = {len(u) for u in local}
        if len(lengths) > 1:
            raise TraceError("local traces must have equal length")
        length = lengths.pop() if lengths else 0
        bits = {p: 1 << k for k, p in enumerate(arch.props)}
        codes = []
        for t in range(length):
            code = 0
            for i, u in enumerate(local):
                ev = frozenset(u[t])
                extra = ev - arch.local(i)
                if extra:
                    raise TraceError(f"t={t}: {sorted(extra)} not observable by {arch.components[i].name}")
                for p in ev:
                    code |= bits[p]
            codes.append(code)
        return cls(arch, codes)

    @classmethod
    def from_global(cls, arch: Architecture, events: Sequence[Iterable[str]]) -> "GlobalTrace":
        bits = {p: 1 << k for k, p in enumerate(arch.props)}
        codes = []
        for t, ev in enumerate(events):
            code = 0
            for p in ev:
                if p not in bits:
                    raise TraceError(f"t={t}: unknown proposition {p!r}")
                code |= bits[p]
            codes.append(code)
        return cls(arch, codes)

    def __len__(self) -> int:
        return len(self._codes)

    def _decode(self, code: int) -> frozenset:
        ev = self._decoded.get(code)
        if ev is None:
            ev = frozenset(p for p in self._props if code & self._bit[p])
            self._decoded[code] = ev
        return ev

    def code(self, t: int) -> int:
        return self._codes[t]

    def global_event(self, t: int) -> frozenset:
        return self._decode(self._codes[t])

    def local_event(self, i: int, t: int) -> frozenset:
        return self._decode(self._codes[t] & self._masks[i])

    def events(self) -> list[frozenset]:
        return [self.global_event(t) for t in range(len(self))]

    def local_trace(self, i: int) -> list[frozenset]:
        return [self.local_event(i, t) for t in range(len(self))]

    def prefix(self, length: int) -> "GlobalTrace":
        return GlobalTrace(self.arch, self._codes[:length])

    def padded(self, extra: int) -> "GlobalTrace":
        """This trace followed by ``extra`` empty events."""
        return GlobalTrace(self.arch, self._codes + [0] * extra)


@dataclass
class RunResult:
    verdict: Verdict
    time: int | None            # index of the event at which the verdict was reached
    monitor: int | None         # reporting component (decentralised runs)
    messages: int
    steps: int                  # events consumed
    message_size: int = 0       # total temporal+Boolean node count of shipped obligations
    max_past_depth: int = 0
    log: list = field(default_factory=list, repr=False)

    @property
    def trace_length(self) -> int | None:
        return None if self.time is None else self.time + 1


def _check(arch: Architecture, spec: Formula, trace: GlobalTrace) -> None:
    if trace.arch != arch:
        raise TraceError("trace was built for a different architecture")
    if not is_past_free(spec):
        raise ValueError("specifications must not contain X~ or '#'")
    unknown = props_of(spec) - set(arch.owner)
    if unknown:
        raise TraceError(f"formula mentions propositions outside the architecture: {sorted(unknown)}")


def _node_count(f: Formula) -> int:
    return 1 + sum(_node_count(a) for a in f._args if isinstance(a, Formula))


def run_decentralised(arch: Architecture, spec: Formula, trace: GlobalTrace,
                      extension_cap: int = 0, *, record: bool = False) -> RunResult:
    """Run one local monitor per component over ``trace``.

    After the trace, up to ``extension_cap`` rounds of empty local events are
    appended. The run stops at the first round in which some monitor reaches
    a conclusive verdict; obligations emitted in that round are never
    delivered and are not counted.
    """
    _check(arch, spec, trace)
    n = arch.n
    states = [LocalMonitorState.initial(arch, i, spec) for i in range(n)]
    pending: list[Message] = []
    messages = size = depth = 0
    log = []
    total = len(trace) + extension_cap
    for t in range(total):
        inbox: list[list[Formula]] = [[] for _ in range(n)]
        for m in pending:
            inbox[m.receiver].append(m.formula)
        outgoing: list[Message] = []
        reports: list[tuple[int, Verdict]] = []
        row = []
        for i in range(n):
            if len(inbox[i]) > n - 1:
                raise InvariantViolation(f"monitor {i} received {len(inbox[i])} messages")
            ev = trace.local_event(i, t) if t < len(trace) else frozenset()
            out = monitor_step(states[i], ev, inbox[i])
            states[i] = out.state
            depth = max(depth, out.progressed.past_depth)
            if out.verdict.conclusive:
                reports.append((i, out.verdict))
            if out.message is not None:
                outgoing.append(out.message)
            if record:
                row.append(out)
        if record:
            log.append(row)
        if reports:
            kinds = {v for _, v in reports}
            if len(kinds) > 1:
                raise InvariantViolation(f"contradictory local verdicts at t={t}: {reports}")
            i, v = reports[0]
            return RunResult(v, t, i, messages, t + 1, size, depth, log)
        messages += len(outgoing)
        size += sum(_node_count(m.formula) for m in outgoing)
        pending = outgoing
    return RunResult(Verdict.UNKNOWN, None, None, messages, total, size, depth, log)


def run_centralised(arch: Architecture, spec: Formula, trace: GlobalTrace,
                    *, record: bool = False) -> RunResult:
    """Progress ``spec`` over the merged global trace.

    Every consumed step costs ``n`` messages: each component ships its
    observation to the central monitor.
    """
    _check(arch, spec, trace)
    n = arch.n
    f = simplify(spec)
    log = []
    for t in range(len(trace)):
        f = progress_event(f, trace.global_event(t))
        if record:
            log.append(f)
        v = Verdict.of(f)
        if v.conclusive:
            return RunResult(v, t, None, n * (t + 1), t + 1, log=log)
    return RunResult(Verdict.UNKNOWN, None, None, n * len(trace), len(trace), log=log)


def compare_run(arch: Architecture, spec: Formula, trace: GlobalTrace,
                extension_cap: int | None = None) -> tuple[RunResult, RunResult]:
    """Centralised and decentralised runs on the same trace.

    The decentralised run may read up to ``extension_cap`` (default ``n``)
    empty events past the end of the trace, but only when the centralised
    monitor concluded, so that a delayed verdict can surface.
    """
    if extension_cap is None:
        extension_cap = arch.n
    central = run_centralised(arch, spec, trace)
    pad = extension_cap if central.verdict.conclusive else 0
    decentral = run_decentralised(arch, spec, trace, pad)
    return central, decentral


# ------------------------------------------------------------------- files


def load_architecture(path) -> Architecture:
    with open(path) as fh:
        data = json.load(fh)
    return architecture_from_dict(data)


def architecture_from_dict(data: dict) -> Architecture:
    try:
        comps = tuple(Component(str(c["name"]), frozenset(map(str, c["props"])))
                      for c in data["components"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed architecture: {exc}") from exc
    return Architecture(comps)


def architecture_to_dict(arch: Architecture) -> dict:
    return {"components": [{"name": c.name, "props": sorted(c.props)} for c in arch.components]}


def parse_trace_lines(arch: Architecture, lines: Iterable[str]) -> GlobalTrace:
    """Read the line-oriented JSON trace format."""
    names = {c.name: i for i, c in enumerate(arch.components)}
    local: list[list[frozenset]] = [[] for _ in range(arch.n)]
    expected = 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceError(f"line {lineno}: {exc}") from exc
        if obj.get("t") != expected:
            raise TraceError(f"line {lineno}: expected t={expected}, got {obj.get('t')!r}")
        comps = obj.get("components", {})
        for name in comps:
            if name not in names:
                raise TraceError(f"line {lineno}: unknown component {name!r}")
        for name, i in names.items():
            local[i].append(frozenset(comps.get(name, ())))
        expected += 1
    try:
        return GlobalTrace.from_local(arch, local)
    except TraceError as exc:
        raise TraceError(str(exc)) from None


def load_trace(arch: Architecture, path) -> GlobalTrace:
    with open(path) as fh:
        return parse_trace_lines(arch, fh)


def dump_trace(trace: GlobalTrace) -> str:
    arch = trace.arch
    out = []
    for t in range(len(trace)):
        comps = {c.name: sorted(trace.local_event(i, t)) for i, c in enumerate(arch.components)}
        out.append(json.dumps({"t": t, "components": comps}))
    return "\n".join(out) + ("\n" if out else "")
