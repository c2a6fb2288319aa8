"""Centralised and decentralised LTL monitoring by formula progression."""
from .decentral import Architecture, Component
from .formula import parse_formula, print_formula, simplify
from .lasso import LassoWord, eval_lasso
from .progression import Verdict, progress_event, progress_trace
from .simulation import GlobalTrace, compare_run, run_centralised, run_decentralised

__all__ = [
    "Architecture", "Component", "GlobalTrace", "LassoWord", "Verdict",
    "compare_run", "eval_lasso", "parse_formula", "print_formula",
    "progress_event", "progress_trace", "run_centralised", "run_decentralised",
    "simplify",
]
__version__ = "0.1.0"
