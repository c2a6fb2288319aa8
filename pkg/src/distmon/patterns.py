"""Specification-pattern templates (Dwyer, Avrunin and Corbett's catalogue).

Placeholders are the atoms P, S, T (events of interest), Q, R (scope
delimiters) and Z (chain constraint). ``W`` is weak until.
"""
from __future__ import annotations

from functools import lru_cache

from .formula import Formula, parse_formula, props_of

PLACEHOLDERS = ("P", "S", "T", "Q", "R", "Z")

# kind -> scope -> template
CATALOGUE: dict[str, dict[str, str]] = {
    "absence": {
        "globally": "G !P",
        "before": "F R -> (!P U R)",
        "after": "G (Q -> G !P)",
        "between": "G (Q & !R & F R -> (!P U R))",
        "after-until": "G (Q & !R -> (!P W R))",
    },
    "existence": {
        "globally": "F P",
        "before": "!R W (P & !R)",
        "after": "G !Q | F (Q & F P)",
        "between": "G (Q & !R -> (!R W (P & !R)))",
        "after-until": "G (Q & !R -> (!R U (P & !R)))",
    },
    "bounded existence": {
        "globally": "!P W (P W (!P W (P W G !P)))",
        "before": "F R -> ((!P & !R) U (R | ((P & !R) U (R | ((!P & !R) U (R | ((P & !R) U (R | (!P U R)))))))))",
        "after": "F Q -> (!Q U (Q & (!P W (P W (!P W (P W G !P))))))",
        "between": "G (Q & F R -> ((!P & !R) U (R | ((P & !R) U (R | ((!P & !R) U (R | ((P & !R) U (R | (!P U R))))))))))",
        "after-until": "G (Q -> ((!P & !R) U (R | ((P & !R) U (R | ((!P & !R) U (R | ((P & !R) U (R | (!P W R) | G P)))))))))",
    },
    "universal": {
        "globally": "G P",
        "before": "F R -> (P U R)",
        "after": "G (Q -> G P)",
        "between": "G (Q & !R & F R -> (P U R))",
        "after-until": "G (Q & !R -> (P W R))",
    },
    "precedence": {
        "globally": "!P W S",
        "before": "F R -> (!P U (S | R))",
        "after": "G !Q | F (Q & (!P W S))",
        "between": "G (Q & !R & F R -> (!P U (S | R)))",
        "after-until": "G (Q & !R -> (!P W (S | R)))",
    },
    "response": {
        "globally": "G (P -> F S)",
        "before": "F R -> ((P -> (!R U (S & !R))) U R)",
        "after": "G (Q -> G (P -> F S))",
        "between": "G (Q & !R & F R -> ((P -> (!R U (S & !R))) U R))",
        "after-until": "G (Q & !R -> ((P -> (!R U (S & !R))) W R))",
    },
    # S, T precede P
    "precedence chain": {
        "globally": "F P -> (!P U (S & !P & X (!P U T)))",
        "before": "F R -> (!P U (R | (S & !P & X (!P U T))))",
        "after": "G !Q | (!Q U (Q & (F P -> (!P U (S & !P & X (!P U T))))))",
        "between": "G (Q & F R -> (!P U (R | (S & !P & X (!P U T)))))",
        "after-until": "G (Q -> (F P -> (!P U (R | (S & !P & X (!P U T))))))",
    },
    # P responds to S, T
    "response chain": {
        "globally": "G (S & X F T -> X F (T & F P))",
        "before": "F R -> ((S & X (!R U T) -> X (!R U (T & F P))) U R)",
        "after": "G (Q -> G (S & X F T -> X (!T U (T & F P))))",
        "between": "G (Q & F R -> ((S & X (!R U T) -> X (!R U (T & F P))) U R))",
        "after-until": "G (Q -> ((S & X (!R U T) -> X (!R U (T & F P))) U (R | G (S & X (!R U T) -> X (!R U (T & F P))))))",
    },
    # S, T without Z respond to P
    "constrained chain": {
        "globally": "G (P -> F (S & !Z & X (!Z U T)))",
        "before": "F R -> ((P -> (!R U (S & !R & !Z & X ((!R & !Z) U T)))) U R)",
        "after": "G (Q -> G (P -> F (S & !Z & X (!Z U T))))",
        "between": "G (Q & F R -> ((P -> (!R U (S & !R & !Z & X ((!R & !Z) U T)))) U R))",
        "after-until": "G (Q -> ((P -> (!R U (S & !R & !Z & X ((!R & !Z) U T)))) U (R | G (P -> (S & !Z & X (!Z U T))))))",
    },
}

KINDS = tuple(CATALOGUE)
SCOPES = ("globally", "before", "after", "between", "after-until")


@lru_cache(maxsize=None)
def template(kind: str, scope: str) -> Formula:
    try:
        text = CATALOGUE[kind][scope]
    except KeyError:
        raise ValueError(f"unknown pattern {kind!r} / scope {scope!r}") from None
    return parse_formula(text, PLACEHOLDERS)


def placeholders(kind: str, scope: str) -> tuple[str, ...]:
    used = props_of(template(kind, scope))
    return tuple(p for p in PLACEHOLDERS if p in used)
