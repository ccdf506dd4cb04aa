"""Decision procedures for Horn clauses over linear rational arithmetic
restricted to simple bounds.

The main entry points are :func:`parse_problem` and :func:`decide`; the
``slr-hammer`` command wraps both.
"""

from .errors import HammerError, ParseError
from .formula import Conjecture, Problem
from .parser import parse_problem, print_problem
from .pipeline import (
    ENTAILED,
    NOT_ENTAILED,
    SATISFIABLE,
    UNSATISFIABLE,
    Verdict,
    decide,
    decide_ground,
)

__version__ = "0.1.0"

__all__ = [
    "ENTAILED",
    "NOT_ENTAILED",
    "SATISFIABLE",
    "UNSATISFIABLE",
    "Conjecture",
    "HammerError",
    "ParseError",
    "Problem",
    "Verdict",
    "decide",
    "decide_ground",
    "parse_problem",
    "print_problem",
]
