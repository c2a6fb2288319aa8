"""Ultimately periodic words and an exact LTL evaluator over them.

The evaluator labels every subformula with the set of positions of the
lasso where it holds, encoded as a Python int bitmask (bit j = position j).
Until is solved as a least fixpoint over the finite position graph, whose
last position loops back to the start of the loop. This is the reference
semantics that the progression code is tested against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .formula import (
    And, Atom, Bottom, Finally, Formula, Globally, Next, Not, Or, PrevPow,
    Sharp, Top, Until,
)

Event = frozenset


def event(*props: str) -> frozenset[str]:
    return frozenset(props)


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . loop^omega``."""

    prefix: tuple[frozenset, ...]
    loop: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(frozenset(e) for e in self.prefix))
        object.__setattr__(self, "loop", tuple(frozenset(e) for e in self.loop))
        if not self.loop:
            raise ValueError("lasso loop must contain at least one event")

    def __getitem__(self, i: int) -> frozenset:
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.loop[(i - p) % len(self.loop)]

    def prepend(self, events: Iterable[Iterable[str]]) -> "LassoWord":
        return LassoWord(tuple(frozenset(e) for e in events) + self.prefix, self.loop)

    def unrolled(self, extra: int) -> "LassoWord":
        """Same word with the prefix extended by ``extra`` loop copies."""
        return LassoWord(self.prefix + self.loop * extra, self.loop)


class PastPositionError(ValueError):
    pass


class _Labeller:
    def __init__(self, w: LassoWord):
        self.w = w
        self.p = len(w.prefix)
        self.n = self.p + len(w.loop)
        self.full = (1 << self.n) - 1
        self.events = w.prefix + w.loop
        self.memo: dict[Formula, int] = {}

    def nxt(self, z: int) -> int:
        # value at succ(j) for every j; succ(n-1) = p
        return (z >> 1) | (((z >> self.p) & 1) << (self.n - 1))

    def label(self, f: Formula) -> int:
        r = self.memo.get(f)
        if r is not None:
            return r
        t = type(f)
        if t is Atom:
            r = 0
            for j, e in enumerate(self.events):
                if f.name in e:
                    r |= 1 << j
        elif t is Top:
            r = self.full
        elif t is Bottom:
            r = 0
        elif t is Not:
            r = self.full & ~self.label(f.operand)
        elif t is And:
            r = self.full
            for c in f.children:
                r &= self.label(c)
        elif t is Or:
            r = 0
            for c in f.children:
                r |= self.label(c)
        elif t is Next:
            r = self.nxt(self.label(f.operand))
        elif t is Until:
            r = self._until(self.label(f.left), self.label(f.right))
        elif t is Finally:
            r = self._until(self.full, self.label(f.operand))
        elif t is Globally:
            r = self.full & ~self._until(self.full, self.full & ~self.label(f.operand))
        elif t is PrevPow:
            r = 0
            m = f.depth
            for j in range(m, self.n):
                if f.name in self.events[j - m]:
                    r |= 1 << j
        elif t is Sharp:
            raise ValueError("'#' has no trace semantics")
        else:
            raise TypeError(f"cannot evaluate {f!r}")
        self.memo[f] = r
        return r

    def _until(self, left: int, right: int) -> int:
        z = right
        while True:
            z2 = right | (left & self.nxt(z))
            if z2 == z:
                return z
            z = z2


def eval_lasso(f: Formula, w: LassoWord, i: int = 0) -> bool:
    """Decide ``w^i |= f``.

    ``X~^m p`` at position j holds iff ``p`` is in ``w(j - m)``; evaluating a
    formula whose past depth exceeds ``i`` raises :class:`PastPositionError`.
    """
    if i < 0:
        raise ValueError("position must be non-negative")
    depth = f.past_depth
    if depth > i:
        raise PastPositionError(f"X~^{depth} needs position >= {depth}, got {i}")
    if depth:
        # every loop position j then satisfies j - depth >= original prefix length
        w = w.unrolled(-(-depth // len(w.loop)))
    lab = _Labeller(w)
    if i >= lab.n:
        i = lab.p + (i - lab.p) % len(w.loop)
    return bool((lab.label(f) >> i) & 1)


def lasso_from(prefix: Sequence[Iterable[str]], loop: Sequence[Iterable[str]]) -> LassoWord:
    return LassoWord(tuple(frozenset(e) for e in prefix), tuple(frozenset(e) for e in loop))
