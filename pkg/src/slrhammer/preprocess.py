"""Clause-set transformations applied before test points are computed.

* positively grounded predicates: every positive occurrence is a ground
  fact, so their negative occurrences can be resolved away (``elim``);
* conjecture flattening, which turns a positive conjecture into a single
  goal atom plus defining Horn clauses;
* the reductions of existential conjectures and of plain satisfiability
  checks to the universal case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import CombinatorialLimit, NonPositiveConjecture, NotComplementary
from .formula import (
    BOTTOM,
    And,
    Conjecture,
    Formula,
    Not,
    Or,
    TheoryConj,
    formula_vars,
    is_positive,
)
from .logic import (
    Clause,
    FreeAtom,
    Literal,
    Num,
    Var,
    abstract_clause,
    bound_parts,
    constraint_satisfiable,
    hierarchic_resolve,
    simplify_theory_atom,
)

ELIM_CAP = 10**7


def fact_tuple(clause: Clause) -> tuple[str, tuple[Fraction, ...]] | None:
    """``(pred, values)`` if the clause is an abstracted (or literal) ground fact."""
    if len(clause.literals) != 1 or not clause.literals[0].positive:
        return None
    atom = clause.literals[0].atom
    eqs: dict[Var, Fraction] = {}
    for a in clause.constraint:
        b = bound_parts(simplify_theory_atom(a))
        if b is None or b[1] != "=" or not isinstance(b[0], Var) or b[0] in eqs:
            return None
        eqs[b[0]] = b[2]
    values = []
    for arg in atom.args:
        if isinstance(arg, Num):
            values.append(arg.value)
        elif isinstance(arg, Var) and arg in eqs:
            values.append(eqs[arg])
        else:
            return None
    if set(eqs) - set(atom.vars()):
        return None
    return atom.pred, tuple(values)


@dataclass
class PositivelyGrounded:
    predicates: frozenset[str]
    facts: dict[str, list[tuple[Fraction, ...]]] = field(default_factory=dict)

    def __contains__(self, pred: str) -> bool:
        return pred in self.predicates


def find_positively_grounded(clauses: Iterable[Clause], exclude: Iterable[str] = ()) -> PositivelyGrounded:
    """Maximal set of predicates whose positive occurrences are all ground facts."""
    clauses = list(clauses)
    preds: set[str] = set()
    bad: set[str] = set(exclude)
    facts: dict[str, list] = {}
    for c in clauses:
        preds |= c.predicates()
        ft = fact_tuple(c)
        if ft is not None:
            rows = facts.setdefault(ft[0], [])
            if ft[1] not in rows:
                rows.append(ft[1])
            continue
        bad |= {l.pred for l in c.positive}
    chosen = frozenset(preds - bad)
    return PositivelyGrounded(chosen, {p: facts.get(p, []) for p in sorted(chosen)})


def _fact_clause(pred: str, values: tuple[Fraction, ...]) -> Clause:
    return Clause((), (Literal(FreeAtom(pred, tuple(Num(v) for v in values)), True),))


def elim(grounded: PositivelyGrounded, clauses: Iterable[Clause], prune: bool = True,
         cap: int = ELIM_CAP) -> list[Clause]:
    """Resolve away all negative occurrences of positively grounded predicates.

    Fact clauses are kept.  With ``prune`` set, resolvents whose constraint
    is unsatisfiable are dropped as soon as they appear.
    """
    out: dict[Clause, None] = {}
    steps = 0
    for clause in clauses:
        if any(l.positive and l.pred in grounded for l in clause.literals):
            out.setdefault(clause)
            continue
        work = [clause]
        while work:
            c = work.pop(0)
            idx = next((k for k, l in enumerate(c.literals) if not l.positive and l.pred in grounded), None)
            if idx is None:
                out.setdefault(abstract_clause(c))
                continue
            for values in grounded.facts.get(c.literals[idx].pred, []):
                steps += 1
                if steps > cap:
                    raise CombinatorialLimit(f"elim exceeded {cap} instantiations")
                try:
                    r = hierarchic_resolve(c, idx, _fact_clause(c.literals[idx].pred, values), 0)
                except NotComplementary:  # argument clashes with a constant
                    continue
                if prune and not constraint_satisfiable(r.constraint):
                    continue
                work.append(r)
    return list(out)


def elim_rounds(clauses: Iterable[Clause], rounds: int = 1, exclude: Iterable[str] = ()) -> list[Clause]:
    """Apply ``elim`` repeatedly, recomputing the grounded set each round."""
    clauses = list(clauses)
    for _ in range(rounds):
        g = find_positively_grounded(clauses, exclude)
        if not any(not l.positive and l.pred in g for c in clauses for l in c.literals):
            break
        clauses = elim(g, clauses)
    return clauses


@dataclass
class FlattenResult:
    goal: FreeAtom
    definitions: list[Clause]
    guard: tuple = ()


class _Flattener:
    def __init__(self, order: tuple[Var, ...], start: int):
        self.order = order
        self.counter = start
        self.rules: list[Clause] = []

    def fresh(self, f: Formula) -> FreeAtom:
        used = set(formula_vars(f))
        args = tuple(v for v in self.order if v in used)
        name = f"_flat{self.counter}"
        self.counter += 1
        return FreeAtom(name, args)

    def pflat(self, f: Formula) -> FreeAtom:
        if isinstance(f, FreeAtom) and all(isinstance(a, Var) for a in f.args):
            return f
        if isinstance(f, Not):
            raise NonPositiveConjecture(f"negative literal !{f.atom} in conjecture")
        head = self.fresh(f)
        if isinstance(f, FreeAtom):
            self.rules.append(abstract_clause(Clause((), (Literal(f, False), Literal(head, True)))))
        elif isinstance(f, TheoryConj):
            self.rules.append(Clause(tuple(f.atoms), (Literal(head, True),)))
        elif isinstance(f, And):
            theory = tuple(a for c in f.children if isinstance(c, TheoryConj) for a in c.atoms)
            body = [self.pflat(c) for c in f.children if not isinstance(c, TheoryConj)]
            self.rules.append(abstract_clause(
                Clause(theory, tuple(Literal(b, False) for b in body) + (Literal(head, True),))))
        else:
            for c in f.children:
                if isinstance(c, TheoryConj):
                    self.rules.append(Clause(tuple(c.atoms), (Literal(head, True),)))
                    continue
                sub = self.pflat(c)
                self.rules.append(abstract_clause(Clause((), (Literal(sub, False), Literal(head, True)))))
        return head


def flatten_conjecture(conjecture: Conjecture, start: int = 0) -> FlattenResult:
    """Replace a positive conjecture by one goal atom and its defining clauses.

    Theory conjunctions directly below an And or Or node become the
    constraint of that node's defining clause.  Fresh predicates are named
    ``_flat<k>`` in pre-order starting at ``start``.
    """
    if not is_positive(conjecture.body):
        raise NonPositiveConjecture("only positive conjectures can be flattened")
    fl = _Flattener(conjecture.variables, start)
    goal = fl.pflat(conjecture.body)
    return FlattenResult(goal, fl.rules)


def split_guard(conjecture: Conjecture) -> FlattenResult | None:
    """Recognise ``Lambda || P(xs)`` and return ``P(xs)`` guarded by ``Lambda``.

    Applies when the body is a single variable-only atom, optionally in
    disjunction with single complemented theory atoms.
    """
    body = conjecture.body
    children = body.children if isinstance(body, Or) else (body,)
    atoms = [c for c in children if isinstance(c, FreeAtom)]
    theory = [c for c in children if isinstance(c, TheoryConj) and len(c.atoms) == 1]
    if len(atoms) != 1 or len(atoms) + len(theory) != len(children):
        return None
    goal = atoms[0]
    if not all(isinstance(a, Var) for a in goal.args):
        return None
    if set(goal.vars()) != set(conjecture.variables):
        return None
    guard = tuple(t.atoms[0].complement() for t in theory)
    return FlattenResult(goal, [], guard)


def reduce_existential(conjecture: Conjecture, clauses: Iterable[Clause], start: int = 0) -> list[Clause]:
    """``N |= exists xs. phi`` iff the returned clause set is unsatisfiable."""
    fr = flatten_conjecture(conjecture, start)
    refute = abstract_clause(Clause((), (Literal(fr.goal, False),)))
    return list(clauses) + fr.definitions + [refute]


def satisfiability_as_conjecture(clauses: Iterable[Clause] = ()) -> Conjecture:
    """The conjecture ``false``: entailed exactly when the clauses are unsatisfiable."""
    return Conjecture("forall", (), BOTTOM)
