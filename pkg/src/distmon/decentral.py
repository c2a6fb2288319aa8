"""Decentralised progression and the local monitor transition.

Each component ``i`` owns a disjoint set of propositions. Its monitor
rewrites atoms it cannot observe into past obligations ``X~^m p`` and ships
its whole obligation to the monitor that can resolve the most urgent one.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Sequence

from .formula import (
    FALSE, SHARP, TRUE, And, Formula, Not, Or, PrevPow, conj, props_of, simplify,
)
from .progression import Verdict, rewrite


class InvariantViolation(AssertionError):
    """A property guaranteed by the algorithm was observed to fail."""


class DelayBoundViolation(InvariantViolation):
    pass


class HistoryUnderflow(InvariantViolation):
    pass


@dataclass(frozen=True)
class Component:
    name: str
    props: frozenset[str]


@dataclass(frozen=True)
class Architecture:
    """Components in priority order (index 0 has the highest priority)."""

    components: tuple[Component, ...]
    owner: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        comps = tuple(Component(c.name, frozenset(c.props)) for c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("an architecture needs at least one component")
        names = [c.name for c in comps]
        if len(set(names)) != len(names):
            raise ValueError("component names must be unique")
        owner: dict[str, int] = {}
        for i, c in enumerate(comps):
            if not c.props:
                raise ValueError(f"component {c.name!r} observes no proposition")
            for p in c.props:
                if p in owner:
                    raise ValueError(f"proposition {p!r} is observed by two components")
                owner[p] = i
        object.__setattr__(self, "owner", owner)

    @classmethod
    def from_partition(cls, parts: Sequence[Iterable[str]], names: Sequence[str] | None = None):
        if names is None:
            names = [chr(ord("A") + i) if i < 26 else f"C{i}" for i in range(len(parts))]
        return cls(tuple(Component(n, frozenset(p)) for n, p in zip(names, parts)))

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def props(self) -> tuple[str, ...]:
        """All propositions, grouped by component then sorted."""
        return tuple(p for c in self.components for p in sorted(c.props))

    def local(self, i: int) -> frozenset[str]:
        return self.components[i].props

    def index(self, name: str) -> int:
        for i, c in enumerate(self.components):
            if c.name == name:
                return i
        raise KeyError(name)

    def project(self, i: int, ev: Iterable[str]) -> frozenset[str]:
        return frozenset(ev) & self.components[i].props


# ------------------------------------------------------------ progression

_CACHE: dict[tuple, Formula] = {}
_CACHE_LIMIT = 400_000


def decent_progress(f: Formula, event: Iterable[str], local_props: Iterable[str],
                    history: Sequence[frozenset] = ()) -> Formula:
    """Progress ``f`` on a monitor that observes only ``local_props``.

    ``history[k-1]`` is the local event observed ``k`` steps before ``event``.
    Unobservable atoms become ``X~ p``; ``X~^m p`` is resolved against
    ``history[m-1]`` when ``p`` is local and deepened otherwise; ``#`` is kept.
    """
    event = frozenset(event)
    local_props = frozenset(local_props)
    depth = f.past_depth
    key = (f, event, local_props, tuple(history[:depth]))
    r = _CACHE.get(key)
    if r is not None:
        return r

    def atom(p: str) -> Formula:
        if p in event:
            return TRUE
        if p in local_props:
            return FALSE
        return PrevPow(1, p)

    def past(m: int, p: str) -> Formula:
        if p not in local_props:
            return PrevPow(m + 1, p)
        if m > len(history):
            raise HistoryUnderflow(f"X~^{m} {p} needs {m} past events, have {len(history)}")
        return TRUE if p in history[m - 1] else FALSE

    r = rewrite(f, atom, past)
    if len(_CACHE) > _CACHE_LIMIT:
        _CACHE.clear()
    _CACHE[key] = r
    return r


# ------------------------------------------------------ urgency machinery

_SUS: dict[Formula, frozenset] = {}


def sus(f: Formula) -> frozenset[Formula]:
    """Urgent subformulae: the ``X~`` terms of the Boolean skeleton of ``f``."""
    r = _SUS.get(f)
    if r is None:
        t = type(f)
        if t is And or t is Or:
            r = frozenset().union(*(sus(c) for c in f.children))
        elif t is Not:
            r = sus(f.operand)
        elif t is PrevPow:
            r = frozenset((f,))
        else:
            r = frozenset()
        if len(_SUS) > _CACHE_LIMIT:
            _SUS.clear()
        _SUS[f] = r
    return r


def urgency(f: Formula) -> int:
    """Depth of the deepest ``X~`` term in the Boolean skeleton of ``f``."""
    t = type(f)
    if t is And or t is Or:
        return max(urgency(c) for c in f.children)
    if t is Not:
        return urgency(f.operand)
    if t is PrevPow:
        return f.depth
    return 0


def prop_of(f: Formula) -> frozenset[str]:
    return props_of(f)


def mon_target(arch: Architecture, sender: int, props: Iterable[str]) -> int:
    """Smallest component index other than ``sender`` observing one of ``props``."""
    best = None
    for p in props:
        j = arch.owner.get(p)
        if j is None:
            raise ValueError(f"proposition {p!r} is not observed by any component")
        if j != sender and (best is None or j < best):
            best = j
    if best is None:
        raise ValueError(f"no monitor other than {sender} observes {set(props)}")
    return best


def most_urgent(arch: Architecture, sender: int, f: Formula) -> tuple[Formula, int] | None:
    """Most urgent element of ``sus(f)`` and its target; ties go to the lowest target."""
    best = None
    for psi in sus(f):
        cand = (-psi.depth, mon_target(arch, sender, (psi.name,)), psi.key)
        if best is None or cand < best[0]:
            best = (cand, psi)
    if best is None:
        return None
    return best[1], best[0][1]


# ---------------------------------------------------------- local monitor


@dataclass(frozen=True)
class Message:
    sender: int
    receiver: int
    formula: Formula
    time: int


@dataclass(frozen=True)
class LocalMonitorState:
    arch: Architecture = field(repr=False)
    index: int
    obligation: Formula
    history: tuple[frozenset, ...] = ()  # most recent first, at most n entries
    time: int = 0

    @classmethod
    def initial(cls, arch: Architecture, index: int, spec: Formula) -> "LocalMonitorState":
        return cls(arch, index, simplify(spec))


class StepOutcome(NamedTuple):
    state: LocalMonitorState
    verdict: Verdict
    message: Message | None
    progressed: Formula  # obligation after progression, before any '#' replacement


def monitor_step(state: LocalMonitorState, event: Iterable[str],
                 inbox: Iterable[Formula] = ()) -> StepOutcome:
    """One synchronous round of a single local monitor."""
    arch, i, t = state.arch, state.index, state.time
    local = arch.local(i)
    event = frozenset(event)
    if not event <= local:
        raise ValueError(f"event {set(event)} is not local to component {arch.components[i].name}")
    n = arch.n

    goal = conj([state.obligation, *(g for g in inbox if g is not SHARP)])
    if goal is SHARP:
        progressed = SHARP
    else:
        progressed = decent_progress(goal, event, local, state.history)
    if progressed.past_depth > min(n, t + 1):
        raise DelayBoundViolation(
            f"monitor {i} at t={t} holds X~^{progressed.past_depth} (bound {min(n, t + 1)})")
    history = ((event,) + state.history)[:n]

    verdict = Verdict.of(progressed)
    message = None
    obligation = progressed
    if not verdict.conclusive:
        pick = most_urgent(arch, i, progressed)
        if pick is not None:
            psi, target = pick
            if psi.name in local:
                raise InvariantViolation(f"monitor {i} kept a local past obligation {psi}")
            message = Message(i, target, progressed, t)
            obligation = SHARP
    new_state = replace(state, obligation=obligation, history=history, time=t + 1)
    return StepOutcome(new_state, verdict, message, progressed)
