"""LTL formula terms, concrete syntax, metrics and syntactic simplification.

Formula nodes are hash-consed: constructing the same term twice yields the
same object, so equality is identity and nodes can be used as cheap
dictionary keys by the progression caches.
"""
from __future__ import annotations

import re
import weakref
from typing import Iterable, Mapping

__all__ = [
    "Formula", "Top", "Bottom", "Sharp", "Atom", "Not", "And", "Or", "Next",
    "Until", "Finally", "Globally", "PrevPow", "TRUE", "FALSE", "SHARP",
    "FormulaSyntaxError", "UnknownAtomError",
    "parse_formula", "print_formula", "temporal_size", "simplify",
    "conj", "disj", "negate", "props_of", "substitute", "is_past_free",
    "implies", "weak_until", "reduce_boolean",
]

_TABLE: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()

# precedence levels used by the printer
_OR, _AND, _UNTIL, _UNARY, _ATOM = 1, 2, 3, 4, 5


class Formula:
    """Base class of all (interned) formula nodes."""

    __slots__ = ("_args", "_text", "_props", "past_depth", "has_sharp", "__weakref__")
    _level = _ATOM

    def __new__(cls, *args):
        key = (cls, args)
        node = _TABLE.get(key)
        if node is None:
            node = object.__new__(cls)
            node._args = args
            node._text = None
            node._props = None
            kids = [a for a in args if isinstance(a, Formula)]
            node.past_depth = max((k.past_depth for k in kids), default=0)
            node.has_sharp = any(k.has_sharp for k in kids)
            _TABLE[key] = node
        return node

    def __reduce__(self):
        return (type(self), self._args)

    def __repr__(self) -> str:
        return f"{type(self).__name__}<{print_formula(self)}>"

    def __str__(self) -> str:
        return print_formula(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    @property
    def key(self) -> str:
        """Canonical text, also used as the total order on nodes."""
        if self._text is None:
            self._text = _render(self)
        return self._text


class Top(Formula):
    __slots__ = ()

    def __new__(cls):
        return super().__new__(cls)


class Bottom(Formula):
    __slots__ = ()

    def __new__(cls):
        return super().__new__(cls)


class Sharp(Formula):
    """Placeholder obligation of a monitor that shipped its goal away."""

    __slots__ = ()

    def __new__(cls):
        node = super().__new__(cls)
        node.has_sharp = True
        return node


class Atom(Formula):
    __slots__ = ()
    __match_args__ = ("name",)

    def __new__(cls, name: str):
        return super().__new__(cls, name)

    @property
    def name(self) -> str:
        return self._args[0]


class PrevPow(Formula):
    """``X~^depth name``: the atom held ``depth`` steps ago."""

    __slots__ = ()
    __match_args__ = ("depth", "name")
    _level = _UNARY

    def __new__(cls, depth: int, name: str):
        if depth < 1:
            raise ValueError("PrevPow depth must be >= 1")
        node = super().__new__(cls, depth, name)
        node.past_depth = depth
        return node

    @property
    def depth(self) -> int:
        return self._args[0]

    @property
    def name(self) -> str:
        return self._args[1]


class _Unary(Formula):
    __slots__ = ()
    __match_args__ = ("operand",)
    _level = _UNARY

    def __new__(cls, operand: Formula):
        return super().__new__(cls, operand)

    @property
    def operand(self) -> Formula:
        return self._args[0]


class Not(_Unary):
    __slots__ = ()


class Next(_Unary):
    __slots__ = ()


class Finally(_Unary):
    __slots__ = ()


class Globally(_Unary):
    __slots__ = ()


class Until(Formula):
    __slots__ = ()
    __match_args__ = ("left", "right")
    _level = _UNTIL

    def __new__(cls, left: Formula, right: Formula):
        return super().__new__(cls, left, right)

    @property
    def left(self) -> Formula:
        return self._args[0]

    @property
    def right(self) -> Formula:
        return self._args[1]


class _Nary(Formula):
    __slots__ = ()
    __match_args__ = ("children",)

    def __new__(cls, *children: Formula):
        flat: list[Formula] = []
        for c in children:
            if type(c) is cls:
                flat.extend(c._args)
            else:
                flat.append(c)
        if not flat:
            raise ValueError(f"{cls.__name__} needs at least one operand")
        if len(flat) == 1:
            return flat[0]
        return super().__new__(cls, *flat)

    @property
    def children(self) -> tuple[Formula, ...]:
        return self._args


class And(_Nary):
    __slots__ = ()
    _level = _AND


class Or(_Nary):
    __slots__ = ()
    _level = _OR


TRUE = Top()
FALSE = Bottom()
SHARP = Sharp()


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def weak_until(a: Formula, b: Formula) -> Formula:
    return Or(Until(a, b), Globally(a))


# ---------------------------------------------------------------- printing

_UNARY_TOKEN = {Not: "!", Next: "X ", Finally: "F ", Globally: "G "}


def _wrap(f: Formula, level: int) -> str:
    s = f.key
    return f"({s})" if f._level < level else s


def _render(f: Formula) -> str:
    t = type(f)
    if t is Atom:
        return f.name
    if t is Top:
        return "true"
    if t is Bottom:
        return "false"
    if t is Sharp:
        return "#"
    if t is PrevPow:
        return "X~ " * f.depth + f.name
    if t in _UNARY_TOKEN:
        return _UNARY_TOKEN[t] + _wrap(f.operand, _UNARY)
    if t is Until:
        return f"{_wrap(f.left, _UNARY)} U {_wrap(f.right, _UNTIL)}"
    if t is And:
        return " & ".join(_wrap(c, _UNTIL) for c in f.children)
    if t is Or:
        return " | ".join(_wrap(c, _AND) for c in f.children)
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    """Render ``f`` in the concrete syntax accepted by :func:`parse_formula`."""
    return f.key


# ----------------------------------------------------------------- parsing


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


class UnknownAtomError(ValueError):
    def __init__(self, name: str, pos: int):
        super().__init__(f"unknown atomic proposition {name!r} at position {pos}")
        self.name = name
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(->)|(X~)|([!&|()#])|([A-Za-z_][A-Za-z0-9_]*))")
_KEYWORDS = {"X", "F", "G", "U", "W", "true", "false"}
_PREFIX = {"!": Not, "X": Next, "F": Finally, "G": Globally}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet, allow_past: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = None if alphabet is None else frozenset(alphabet)
        self.allow_past = allow_past

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            self.fail(f"expected {tok!r}, found {self.peek()!r}")
        self.i += 1

    def fail(self, msg: str):
        raise FormulaSyntaxError(msg, self.pos(), self.text)

    def parse(self) -> Formula:
        f = self.implication()
        if self.peek() != "<end>":
            self.fail(f"unexpected token {self.peek()!r}")
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conjunction())
        return Or(*parts)

    def conjunction(self) -> Formula:
        parts = [self.until()]
        while self.peek() == "&":
            self.take()
            parts.append(self.until())
        return And(*parts)

    def until(self) -> Formula:
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(left, self.until())
        if self.peek() == "W":
            self.take()
            return weak_until(left, self.until())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in _PREFIX:
            self.take()
            return _PREFIX[tok](self.unary())
        if tok == "X~":
            pos = self.pos()
            if not self.allow_past:
                self.fail("past operator X~ is not allowed in specifications")
            self.take()
            inner = self.unary()
            if isinstance(inner, Atom):
                return PrevPow(1, inner.name)
            if isinstance(inner, PrevPow):
                return PrevPow(inner.depth + 1, inner.name)
            raise FormulaSyntaxError("X~ applies only to atomic propositions", pos, self.text)
        return self.primary()

    def primary(self) -> Formula:
        tok, pos = self.tokens[self.i]
        if tok == "(":
            self.take()
            f = self.implication()
            self.expect(")")
            return f
        if tok == "#":
            if not self.allow_past:
                self.fail("'#' is not allowed in specifications")
            self.take()
            return SHARP
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok[0].isalpha() or tok[0] == "_":
            if tok in _KEYWORDS:
                self.fail(f"unexpected operator {tok!r}")
            if self.alphabet is not None and tok not in self.alphabet:
                raise UnknownAtomError(tok, pos)
            self.take()
            return Atom(tok)
        self.fail(f"unexpected token {tok!r}")


def parse_formula(text: str, alphabet: Iterable[str] | None = None, *,
                  allow_past: bool = False) -> Formula:
    """Parse ``text``; atoms must belong to ``alphabet`` unless it is None.

    ``allow_past`` admits ``X~`` and ``#``, which only occur in obligations
    produced by decentralised progression, never in specifications.
    """
    return _Parser(text, alphabet, allow_past).parse()


# ----------------------------------------------------------------- metrics

_TEMPORAL = (Next, Finally, Globally, Until)


def temporal_size(f: Formula) -> int:
    """Number of temporal operator occurrences (X, U, F, G) in ``f``."""
    if f.past_depth or f.has_sharp:
        raise ValueError("temporal_size expects a past-free formula without '#'")
    return _tsize(f)


def _tsize(f: Formula) -> int:
    n = 1 if isinstance(f, _TEMPORAL) else 0
    for a in f._args:
        if isinstance(a, Formula):
            n += _tsize(a)
    return n


def props_of(f: Formula) -> frozenset[str]:
    """All proposition names occurring in ``f`` (including under X~)."""
    if f._props is None:
        t = type(f)
        if t is Atom or t is PrevPow:
            f._props = frozenset((f.name,))
        else:
            acc: frozenset[str] = frozenset()
            for a in f._args:
                acc = acc | props_of(a)
            f._props = acc
    return f._props


def is_past_free(f: Formula) -> bool:
    return f.past_depth == 0 and not f.has_sharp


def substitute(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename atoms according to ``mapping`` (names not in it are kept)."""
    t = type(f)
    if t is Atom:
        return Atom(mapping.get(f.name, f.name))
    if t is PrevPow:
        return PrevPow(f.depth, mapping.get(f.name, f.name))
    if not f._args:
        return f
    return t(*(substitute(a, mapping) for a in f._args))


# ------------------------------------------------------------- simplifier

_SIMPLIFIED: dict[Formula, Formula] = {}
_CACHE_LIMIT = 500_000


def negate(f: Formula) -> Formula:
    """Simplifying negation of an already simplified formula."""
    t = type(f)
    if t is Top:
        return FALSE
    if t is Bottom:
        return TRUE
    if t is Not:
        return f.operand
    return Not(f)


def _nary(children: Iterable[Formula], cls, unit: Formula, zero: Formula) -> Formula:
    # operands are assumed simplified
    seen: set[Formula] = set()
    kept: list[Formula] = []
    sharp = False
    for c in children:
        t = type(c)
        if t is cls:
            items = c._args
        else:
            items = (c,)
        for x in items:
            if x is zero:
                return zero
            if x is unit:
                continue
            if x is SHARP:
                if cls is And:
                    sharp = True
                    continue
            if x not in seen:
                seen.add(x)
                kept.append(x)
    if not kept:
        return SHARP if sharp else unit
    if len(kept) == 1:
        return kept[0]
    dual = Or if cls is And else And
    out = []
    for x in kept:
        tx = type(x)
        if tx is Not and x._args[0] in seen:
            return zero
        # absorption: a & (a | b) = a, a | (a & b) = a
        if tx is dual and any(y in seen for y in x._args):
            continue
        out.append(x)
    if len(out) == 1:
        return out[0]
    out.sort(key=_order)
    return Formula.__new__(cls, *out)


def _order(f: Formula) -> str:
    return f.key


def conj(children: Iterable[Formula]) -> Formula:
    """Simplifying conjunction of simplified formulae; ``#`` is neutral."""
    return _nary(children, And, TRUE, FALSE)


def disj(children: Iterable[Formula]) -> Formula:
    """Simplifying disjunction of simplified formulae."""
    return _nary(children, Or, FALSE, TRUE)


def _assume(known: dict, f: Formula, value: bool) -> None:
    known[f] = value
    t = type(f)
    if t is Not:
        known[f._args[0]] = not value
    elif t is Finally:                       # F x == !G !x
        known[Globally(negate(f._args[0]))] = not value
    elif t is Globally:
        known[Finally(negate(f._args[0]))] = not value


def _in_context(f: Formula, known: dict) -> Formula:
    # rewrite the Boolean skeleton of f, replacing subterms whose truth value
    # is fixed by the surrounding context
    v = known.get(f)
    if v is not None:
        return TRUE if v else FALSE
    t = type(f)
    if t is Not:
        return negate(_in_context(f._args[0], known))
    if t is Finally:
        return TRUE if known.get(f._args[0]) is True else f
    if t is Globally:
        return FALSE if known.get(f._args[0]) is False else f
    if t is Until:
        if known.get(f._args[1]) is True:
            return TRUE
        if known.get(f._args[0]) is False and known.get(f._args[1]) is False:
            return FALSE
        return f
    if t is not And and t is not Or:
        return f
    sibling = t is And          # value a sibling must have for f to matter
    zero = FALSE if sibling else TRUE
    kids = list(f._args)
    for i, k in enumerate(kids):
        ctx = dict(known)
        for j, other in enumerate(kids):
            if j != i:
                _assume(ctx, other, sibling)
        new = _in_context(k, ctx)
        if new is zero:
            return zero
        kids[i] = new
    return conj(kids) if t is And else disj(kids)


def reduce_boolean(f: Formula) -> Formula:
    """Contextual simplification of the Boolean skeleton of ``f``.

    Inside ``a | b`` the disjunct ``b`` may assume ``a`` is false, and inside
    ``a & b`` it may assume ``a`` is true. Terms below temporal operators are
    left alone since they speak about other positions.
    """
    while type(f) in (And, Or, Not):
        g = _in_context(f, {})
        if g is f:
            break
        f = g
    return f


def simplify(f: Formula) -> Formula:
    """Bottom-up syntactic simplification; idempotent and semantics-preserving."""
    r = _SIMPLIFIED.get(f)
    if r is not None:
        return r
    t = type(f)
    if t is And:
        r = reduce_boolean(conj([simplify(c) for c in f._args]))
    elif t is Or:
        r = reduce_boolean(disj([simplify(c) for c in f._args]))
    elif t is Not:
        r = negate(simplify(f._args[0]))
    elif t is Next:
        s = simplify(f._args[0])
        r = s if (s is TRUE or s is FALSE) else Next(s)
    elif t is Finally:
        s = simplify(f._args[0])
        r = s if (s is TRUE or s is FALSE or type(s) is Finally) else Finally(s)
    elif t is Globally:
        s = simplify(f._args[0])
        r = s if (s is TRUE or s is FALSE or type(s) is Globally) else Globally(s)
    elif t is Until:
        left = simplify(f._args[0])
        right = simplify(f._args[1])
        if right is TRUE or right is FALSE or left is FALSE or left is right:
            r = right
        elif left is TRUE or left is negate(right):
            r = simplify(Finally(right))
        else:
            r = Until(left, right)
    else:
        r = f
    if len(_SIMPLIFIED) > _CACHE_LIMIT:
        _SIMPLIFIED.clear()
    _SIMPLIFIED[f] = r
    _SIMPLIFIED[r] = r
    return r
