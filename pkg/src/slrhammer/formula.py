"""Conjecture formulas and the problem container."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .logic import (
    FALSE,
    TRUE,
    BoolAtom,
    Clause,
    Constraint,
    FreeAtom,
    TheoryAtom,
    Term,
    Var,
    simplify_theory_atom,
)


@dataclass(frozen=True)
class TheoryConj:
    """Conjunction of theory atoms."""

    atoms: tuple[Constraint, ...]


@dataclass(frozen=True)
class Not:
    """Negated free atom; only the grounding route accepts these."""

    atom: FreeAtom


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]


Formula = Union[And, Or, TheoryConj, FreeAtom, Not]

BOTTOM = Or(())
TOP = And(())


def make_and(children) -> Formula:
    """And-node with nested Ands spliced in and theory atoms merged."""
    flat: list[Formula] = []
    theory: list[Constraint] = []
    slot = None
    for c in children:
        parts = c.children if isinstance(c, And) else (c,)
        for p in parts:
            if isinstance(p, TheoryConj):
                if slot is None:
                    slot = len(flat)
                    flat.append(p)
                theory.extend(p.atoms)
            else:
                flat.append(p)
    if slot is not None:
        flat[slot] = TheoryConj(tuple(theory))
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def make_or(children) -> Formula:
    flat: list[Formula] = []
    for c in children:
        flat.extend(c.children if isinstance(c, Or) else (c,))
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def formula_vars(f: Formula) -> tuple[Var, ...]:
    seen: dict[Var, None] = {}
    for node in walk(f):
        if isinstance(node, TheoryConj):
            for a in node.atoms:
                for v in a.vars():
                    seen.setdefault(v)
        elif isinstance(node, FreeAtom):
            for v in node.vars():
                seen.setdefault(v)
    return tuple(seen)


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, (And, Or)):
        for c in f.children:
            yield from walk(c)
    elif isinstance(f, Not):
        yield f.atom


def theory_atoms(f: Formula) -> list[Constraint]:
    return [a for n in walk(f) if isinstance(n, TheoryConj) for a in n.atoms]


def free_atoms(f: Formula) -> list[FreeAtom]:
    return [n for n in walk(f) if isinstance(n, FreeAtom)]


def is_positive(f: Formula) -> bool:
    return not any(isinstance(n, Not) for n in walk(f))


def substitute(f: Formula, sigma: Mapping[Var, Term]) -> Formula:
    if isinstance(f, FreeAtom):
        return f.substitute(sigma)
    if isinstance(f, Not):
        return Not(f.atom.substitute(sigma))
    if isinstance(f, TheoryConj):
        return TheoryConj(tuple(a.substitute(sigma) for a in f.atoms))
    if isinstance(f, And):
        return And(tuple(substitute(c, sigma) for c in f.children))
    return Or(tuple(substitute(c, sigma) for c in f.children))


def negate(f: Formula) -> Formula:
    """Negation pushed down to the atoms."""
    if isinstance(f, FreeAtom):
        return Not(f)
    if isinstance(f, Not):
        return f.atom
    if isinstance(f, TheoryConj):
        alts = []
        for a in f.atoms:
            if isinstance(a, BoolAtom):
                alts.append(TheoryConj((FALSE if a.value else TRUE,)))
            else:
                alts.append(TheoryConj((a.complement(),)))
        return Or(tuple(alts))
    if isinstance(f, And):
        return Or(tuple(negate(c) for c in f.children))
    return And(tuple(negate(c) for c in f.children))


def evaluate(f: Formula, holds, theory=None) -> bool:
    """Truth value under an interpretation.

    ``holds(atom)`` decides ground free atoms.  ``theory(atom)`` decides
    theory atoms and defaults to exact evaluation after simplification.
    """
    if isinstance(f, FreeAtom):
        return holds(f)
    if isinstance(f, Not):
        return not holds(f.atom)
    if isinstance(f, TheoryConj):
        for a in f.atoms:
            if theory is not None:
                ok = theory(a)
            else:
                s = simplify_theory_atom(a)
                if not isinstance(s, BoolAtom):
                    raise ValueError(f"theory atom {a} is not ground")
                ok = s.value
            if not ok:
                return False
        return True
    if isinstance(f, And):
        return all(evaluate(c, holds, theory) for c in f.children)
    return any(evaluate(c, holds, theory) for c in f.children)


@dataclass(frozen=True)
class Conjecture:
    kind: str  # "forall" or "exists"
    variables: tuple[Var, ...]
    body: Formula

    def __post_init__(self):
        if self.kind not in ("forall", "exists"):
            raise ValueError(f"unknown quantifier {self.kind!r}")

    @property
    def positive(self) -> bool:
        return is_positive(self.body)


@dataclass(frozen=True)
class Problem:
    clauses: tuple[Clause, ...]
    conjecture: Conjecture | None = None
    arities: Mapping[str, int] = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        return (self.clauses, self.conjecture, dict(self.arities)) == (
            other.clauses,
            other.conjecture,
            dict(other.arities),
        )

    def __hash__(self):
        return hash((self.clauses, self.conjecture))

    @property
    def mode(self) -> str:
        """``forall``, ``exists`` or ``sat``; a closed ``false`` conjecture asks for satisfiability."""
        conj = self.conjecture
        if conj is None or (not conj.variables and conj.body == BOTTOM):
            return "sat"
        return conj.kind

    def is_horn(self) -> bool:
        return all(c.is_horn() for c in self.clauses)

    def replace(self, **changes) -> "Problem":
        data = {"clauses": self.clauses, "conjecture": self.conjecture, "arities": self.arities}
        data.update(changes)
        return Problem(**data)


def clause_atoms(clauses) -> list[TheoryAtom]:
    return [a for c in clauses for a in c.constraint if isinstance(a, TheoryAtom)]
