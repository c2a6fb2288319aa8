"""Formula progression and the centralised three-valued monitor."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .formula import (
    FALSE, TRUE, And, Atom, Bottom, Finally, Formula, Globally, Next, Not, Or,
    PrevPow, Sharp, Top, Until, conj, disj, is_past_free, negate, reduce_boolean,
    simplify,
)


class Verdict(enum.Enum):
    TOP = "TOP"
    BOTTOM = "BOTTOM"
    UNKNOWN = "?"

    @property
    def conclusive(self) -> bool:
        return self is not Verdict.UNKNOWN

    @classmethod
    def of(cls, f: Formula) -> "Verdict":
        if f is TRUE:
            return cls.TOP
        if f is FALSE:
            return cls.BOTTOM
        return cls.UNKNOWN


def rewrite(f: Formula, atom: Callable[[str], Formula],
            past: Callable[[int, str], Formula] | None = None) -> Formula:
    """One progression step of ``f``.

    ``atom(p)`` and ``past(m, p)`` give the rewriting of atoms and of
    ``X~^m p``; all other connectives follow the standard progression rules.
    The result is simplified.
    """
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        r = memo.get(g)
        if r is not None:
            return r
        t = type(g)
        if t is Atom:
            r = atom(g.name)
        elif t is And:
            parts = []
            for c in g.children:
                x = go(c)
                if x is FALSE:
                    parts = [FALSE]
                    break
                parts.append(x)
            r = conj(parts)
        elif t is Or:
            parts = []
            for c in g.children:
                x = go(c)
                if x is TRUE:
                    parts = [TRUE]
                    break
                parts.append(x)
            r = disj(parts)
        elif t is Not:
            r = negate(go(g.operand))
        elif t is Next:
            r = simplify(g.operand)
        elif t is Finally:
            r = disj([go(g.operand), simplify(g)])
        elif t is Globally:
            r = conj([go(g.operand), simplify(g)])
        elif t is Until:
            r = disj([go(g.right), conj([go(g.left), simplify(g)])])
        elif t is Top or t is Bottom or t is Sharp:
            r = g
        elif t is PrevPow:
            if past is None:
                raise ValueError("centralised progression is undefined on X~")
            r = past(g.depth, g.name)
        else:
            raise TypeError(f"cannot progress {g!r}")
        memo[g] = r
        return r

    return reduce_boolean(go(f))


_CACHE: dict[tuple, Formula] = {}
_CACHE_LIMIT = 400_000


def progress_event(f: Formula, event: Iterable[str]) -> Formula:
    """Progress ``f`` by one event and simplify the result."""
    event = frozenset(event)
    key = (f, event)
    r = _CACHE.get(key)
    if r is None:
        if not is_past_free(f):
            raise ValueError("progress_event expects a formula without X~ or '#'")
        r = rewrite(f, lambda p: TRUE if p in event else FALSE)
        if len(_CACHE) > _CACHE_LIMIT:
            _CACHE.clear()
        _CACHE[key] = r
    return r


def progress_trace(f: Formula, trace: Sequence[Iterable[str]]) -> Formula:
    """Left fold of :func:`progress_event` over a non-empty trace."""
    if len(trace) == 0:
        raise ValueError("progress_trace needs a non-empty trace")
    for e in trace:
        f = progress_event(f, e)
    return f


@dataclass(frozen=True)
class CentralMonitor:
    obligation: Formula
    steps: int = 0

    def __post_init__(self):
        if not is_past_free(self.obligation):
            raise ValueError("central obligations must not contain X~ or '#'")

    @property
    def verdict(self) -> Verdict:
        return Verdict.of(self.obligation)


def central_step(m: CentralMonitor, event: Iterable[str]) -> tuple[CentralMonitor, Verdict]:
    """Feed one event; conclusive monitors are frozen."""
    v = m.verdict
    if v.conclusive:
        return m, v
    nxt = CentralMonitor(progress_event(m.obligation, event), m.steps + 1)
    return nxt, nxt.verdict


def ltl3_verdict(f: Formula, trace: Sequence[Iterable[str]]) -> Verdict:
    """Verdict reached by progression on a non-empty trace (frozen once conclusive)."""
    m = CentralMonitor(simplify(f))
    v = m.verdict
    for e in trace:
        m, v = central_step(m, e)
        if v.conclusive:
            break
    return v
