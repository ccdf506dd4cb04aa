"""Finite abstractions of a clause set over its test points.

Two routes share the test points:

* the grounding route instantiates every clause and the negated
  conjecture over all test points, keeping theory atoms symbolic;
* the Datalog route replaces each theory atom by a fresh predicate
  (``tren``), tabulates that predicate over the test points (``tfacts``)
  and encodes the conjecture as ground goal rules.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .datalog import GOAL, DatalogProgram, Rule
from .errors import NotHorn, SizeLimit
from .formula import And, Conjecture, Formula, Or, free_atoms, negate, substitute
from .logic import (
    FALSE,
    MIRRORED,
    TRUE,
    BoolAtom,
    Clause,
    FreeAtom,
    Literal,
    Num,
    Point,
    TheoryAtom,
    Var,
    compare,
    make_expr,
    simplify_theory_atom,
)
from .preprocess import FlattenResult
from .testpoints import TestPointSet, idef

SIZE_CAP = 10**7
DOM = "_dom"
EXPECTED = "expected"
MISSING = "missing"


# -- grounding route ----------------------------------------------------

@dataclass
class GroundAbstraction:
    """Ground clauses, interval definitions and the negated conjecture.

    The abstraction is satisfiable iff the conjecture is not entailed.
    """

    ground_clauses: list[Clause]
    interval_bounds: list[TheoryAtom]
    negated_conjecture: Formula
    test_points: TestPointSet
    mode: str = "forall"

    def atoms(self) -> set[FreeAtom]:
        """Free ground atoms occurring in the clauses or the negated conjecture."""
        found = {l.atom for c in self.ground_clauses for l in c.literals}
        return found | set(free_atoms(self.negated_conjecture))


def _assignments(variables: Sequence[Var], points: Sequence[Point]):
    for combo in itertools.product(points, repeat=len(variables)):
        yield dict(zip(variables, combo))


def _live_instances(clause: Clause, points: Sequence[Point], beta, budget: list[int]):
    """Instances whose constraint holds under ``beta``, found depth first.

    Each theory atom is checked as soon as its last variable is bound, so
    whole subtrees with a false constraint are skipped.
    """
    vs = clause.vars()
    pos = {v: k for k, v in enumerate(vs)}
    checks: list[list] = [[] for _ in vs]
    for a in clause.constraint:
        if isinstance(a, BoolAtom):
            if not a.value:
                return
            continue
        coeffs, op, c = a.linear()
        if not coeffs:
            if not compare(Fraction(0), op, c):
                return
            continue
        checks[max(pos[v] for v in coeffs)].append((tuple(coeffs.items()), op, c))
    values: dict[Var, Fraction] = {}
    rho: dict[Var, Point] = {}

    def dfs(k: int):
        if k == len(vs):
            yield clause.substitute(rho)
            return
        v = vs[k]
        for p in points:
            budget[0] -= 1
            if budget[0] < 0:
                raise SizeLimit("grounding exceeds its instance budget")
            values[v] = beta[p]
            rho[v] = p
            if all(compare(sum((q * values[t] for t, q in co), Fraction(0)), op, c) for co, op, c in checks[k]):
                yield from dfs(k + 1)

    yield from dfs(0)


def grounding_hammer(clauses: Iterable[Clause], conjecture: Conjecture | None, tps: TestPointSet,
                     cap: int = SIZE_CAP, live_only: bool = False) -> GroundAbstraction:
    """Ground the clauses and the negated conjecture over the test points.

    With ``live_only`` set, clause instances whose constraint is false under
    the test-point values are left out; they are satisfied in every
    interpretation that respects those values.
    """
    clauses = list(clauses)
    points = tps.all_points()
    n = len(points)
    ground = []
    if live_only:
        budget = [cap]
        for c in clauses:
            ground.extend(_live_instances(c, points, tps.beta, budget))
    else:
        total = sum(n ** len(c.vars()) for c in clauses)
        if total > cap:
            raise SizeLimit(f"grounding would produce {total} instances (cap {cap})")
        for c in clauses:
            for rho in _assignments(c.vars(), points):
                ground.append(c.substitute(rho))
    if conjecture is not None and n ** len(conjecture.variables) > cap:
        raise SizeLimit(f"the conjecture has {n ** len(conjecture.variables)} instances (cap {cap})")
    if conjecture is None:
        neg: Formula = And(())
        mode = "sat"
    else:
        parts = tuple(negate(substitute(conjecture.body, rho))
                      for rho in _assignments(conjecture.variables, points))
        neg = Or(parts) if conjecture.kind == "forall" else And(parts)
        mode = conjecture.kind
    return GroundAbstraction(ground, idef(tps), neg, tps, mode)


# -- Datalog route ------------------------------------------------------

@dataclass(frozen=True)
class TheoryPredicate:
    """Fresh predicate standing for all theory atoms equal up to renaming.

    The atom reads ``sum(coeffs[i] * arg_i) op const``.
    """

    name: str
    coeffs: tuple[Fraction, ...]
    op: str
    const: Fraction

    @property
    def arity(self) -> int:
        return len(self.coeffs)

    def template(self) -> TheoryAtom:
        coeffs, op, const = self.coeffs, self.op, self.const
        if all(k < 0 for k in coeffs):  # read -V0 <= 0 as V0 >= 0
            coeffs, op, const = tuple(-k for k in coeffs), MIRRORED[op], -const
        lhs = make_expr({Var(f"V{i}"): k for i, k in enumerate(coeffs)}, Fraction(0))
        return TheoryAtom(lhs, op, Num(const))

    def holds(self, values: Sequence[Fraction]) -> bool:
        return compare(sum((k * v for k, v in zip(self.coeffs, values)), Fraction(0)), self.op, self.const)


def atom_shape(atom: TheoryAtom) -> tuple[tuple, tuple[Var, ...]]:
    """Renaming-invariant key of a theory atom and its argument order."""
    coeffs, op, c = simplify_theory_atom(atom).linear()
    if op in (">", ">="):
        coeffs = {t: -k for t, k in coeffs.items()}
        c = -c
        op = "<" if op == ">" else "<="
    names = sorted(coeffs, key=lambda t: t.name)
    orders = itertools.permutations(names) if len(names) <= 6 else [tuple(names)]
    best = None
    for order in orders:
        ks = [coeffs[t] for t in order]
        cc = c
        if op in ("=", "!=") and ks[0] < 0:
            ks = [-k for k in ks]
            cc = -cc
        scale = abs(ks[0])
        key = (tuple(k / scale for k in ks), op, cc / scale)
        if best is None or key < best[0]:
            best = (key, tuple(order))
    return best


def _pred_name(key) -> str:
    digest = hashlib.sha1(repr(key).encode()).hexdigest()[:10]
    return f"t_{digest}"


def tren(clauses: Iterable[Clause]) -> tuple[list[Clause], dict[str, TheoryPredicate]]:
    """Replace every theory atom by a negative literal of a fresh predicate.

    Clauses with a FALSE constraint atom are dropped, TRUE atoms vanish.
    """
    preds: dict[str, TheoryPredicate] = {}
    out = []
    for clause in clauses:
        lits: list[Literal] = []
        dead = False
        for a in clause.constraint:
            s = simplify_theory_atom(a)
            if s == TRUE:
                continue
            if s == FALSE:
                dead = True
                break
            key, args = atom_shape(s)
            name = _pred_name(key)
            preds.setdefault(name, TheoryPredicate(name, key[0], key[1], key[2]))
            lit = Literal(FreeAtom(name, args), False)
            if lit not in lits:
                lits.append(lit)
        if not dead:
            out.append(Clause((), tuple(lits) + clause.literals))
    return out, preds


_NP_COMPARE = {"<=": np.less_equal, "<": np.less, "=": np.equal, "!=": np.not_equal,
               ">": np.greater, ">=": np.greater_equal}
_INT64_SAFE = 1 << 62


def _holding_tuples(p: TheoryPredicate, values: Sequence[Fraction]) -> np.ndarray | None:
    """Index tuples (lexicographic) where ``p`` holds, or None if int64 could overflow.

    Values and coefficients are scaled to integers by their common
    denominators, so the comparison stays exact.
    """
    den = math.lcm(*(v.denominator for v in values), 1)
    cden = math.lcm(*(k.denominator for k in p.coeffs), p.const.denominator)
    ints = [int(v * den) for v in values]
    ks = [int(k * cden) for k in p.coeffs]
    rhs = int(p.const * cden * den)
    bound = max(map(abs, ints), default=0) * sum(map(abs, ks)) + abs(rhs)
    if bound >= _INT64_SAFE:
        return None
    grid = np.asarray(ints, dtype=np.int64)
    n = p.arity
    total = np.zeros((1,) * n, dtype=np.int64)
    for axis, k in enumerate(ks):
        shape = [1] * n
        shape[axis] = len(ints)
        total = total + k * grid.reshape(shape)
    total = np.broadcast_to(total, (len(ints),) * n)
    return np.argwhere(_NP_COMPARE[p.op](total, rhs))


def tfacts(preds: dict[str, TheoryPredicate], tps: TestPointSet, cap: int = SIZE_CAP) -> list[FreeAtom]:
    """All groundings of the theory predicates that hold under the test-point values."""
    points = tps.all_points()
    total = sum(len(points) ** p.arity for p in preds.values())
    if total > cap:
        raise SizeLimit(f"tfacts would examine {total} groundings (cap {cap})")
    values = [tps.beta[a] for a in points]
    out = []
    for name in sorted(preds):
        p = preds[name]
        rows = _holding_tuples(p, values) if p.arity else None
        if rows is None:
            for combo in itertools.product(range(len(points)), repeat=p.arity):
                if p.holds([values[i] for i in combo]):
                    out.append(FreeAtom(name, tuple(points[i] for i in combo)))
            continue
        out.extend(FreeAtom(name, tuple(points[i] for i in row)) for row in rows.tolist())
    return out


def _canonical_under_symmetry(combo: Sequence[Point], tps: TestPointSet) -> bool:
    """True for the representative of a tuple's orbit under in-interval permutations."""
    seen: dict[int, int] = {}
    for p in combo:
        k, j = tps.index(p)
        top = seen.get(k, 0)
        if j > top + 1:
            return False
        seen[k] = max(top, j)
    return True


def tfacts_symmetric(facts: Iterable[FreeAtom], tps: TestPointSet) -> bool:
    """Whether the fact set is invariant under swapping neighbouring test points of an interval."""
    facts = set(facts)
    for iv in tps.partition:
        pts = tps.points[iv]
        for a, b in zip(pts, pts[1:]):
            swap = {a: b, b: a}
            for f in facts:
                if any(x in swap for x in f.args):
                    g = FreeAtom(f.pred, tuple(swap.get(x, x) for x in f.args))
                    if g not in facts:
                        return False
    return True


def ground_goal(goal: FreeAtom, tps: TestPointSet, guard: Sequence[TheoryAtom] = (),
                symmetry: bool = False) -> list[FreeAtom]:
    """Instances of the goal atom over the test points.

    Instances whose guard is false under the test-point values are skipped;
    with ``symmetry`` only one instance per orbit of in-interval test-point
    permutations is kept.
    """
    variables = goal.vars()
    out = []
    for combo in itertools.product(tps.all_points(), repeat=len(variables)):
        if symmetry and not _canonical_under_symmetry(combo, tps):
            continue
        rho = dict(zip(variables, combo))
        if guard:
            values = {p: tps.beta[p] for p in combo}
            if not all(a.substitute(rho).evaluate(values) for a in guard):
                continue
        out.append(goal.substitute(rho))
    return out


def goal_transform(clauses: Iterable[Clause]) -> tuple[list[FreeAtom], list[Rule], bool]:
    """Theory-free Horn clauses to Datalog: headless clauses derive ``goal``.

    Head variables that no body atom binds are bound by the domain predicate
    ``_dom``; the third result says whether it is needed.
    """
    facts: list[FreeAtom] = []
    rules: list[Rule] = []
    needs_dom = False
    for c in clauses:
        if not c.is_horn():
            raise NotHorn(f"clause {c} has more than one positive literal")
        head = c.positive[0].atom if c.positive else FreeAtom(GOAL)
        body = [l.atom for l in c.negative]
        bound = {v for a in body for v in a.vars()}
        loose = [v for v in head.vars() if v not in bound]
        if not body and not loose:
            facts.append(head)
            continue
        if loose:
            needs_dom = True
            body += [FreeAtom(DOM, (v,)) for v in loose]
        rule = Rule(head, tuple(body)).canonical()
        if rule not in rules:
            rules.append(rule)
    return facts, rules, needs_dom


def encode_stratified_goal(expected: Sequence[FreeAtom], entailed: str) -> tuple[list[FreeAtom], list[Rule]]:
    """Goal as ``not missing`` with ``missing`` an expected but underived instance."""
    arity = len(expected[0].args) if expected else 0
    facts = [FreeAtom(EXPECTED, a.args) for a in expected]
    xs = tuple(Var(f"V{i}") for i in range(arity))
    rules = [
        Rule(FreeAtom(MISSING), (FreeAtom(EXPECTED, xs),), (FreeAtom(entailed, xs),)),
        Rule(FreeAtom(GOAL), (), (FreeAtom(MISSING),)),
    ]
    return facts, rules


@dataclass
class HammerResult:
    program: DatalogProgram
    theory_predicates: dict[str, TheoryPredicate]
    tfacts: list[FreeAtom]
    goal_atoms: list[FreeAtom] = field(default_factory=list)
    symmetry_used: bool = False


def datalog_hammer(clauses: Iterable[Clause], goal: FlattenResult | None, tps: TestPointSet,
                   stratified: bool = False, symmetry: bool = False,
                   cap: int = SIZE_CAP) -> HammerResult:
    """Datalog program whose least model contains ``goal`` iff the conjecture is entailed.

    ``clauses`` must already contain the conjecture's defining clauses; a
    guard on ``goal`` prunes goal instances.
    Symmetry reduction is only applied when the theory facts are invariant
    under in-interval test-point permutations.
    """
    renamed, preds = tren(clauses)
    facts_t = tfacts(preds, tps, cap)
    facts, rules, needs_dom = goal_transform(renamed)
    program_facts = list(facts_t)
    if needs_dom:
        program_facts += [FreeAtom(DOM, (p,)) for p in tps.all_points()]
    program_facts += [f for f in facts if f not in program_facts]
    goal_atoms: list[FreeAtom] = []
    used_symmetry = False
    if goal is not None:
        if symmetry and tps.m > 1:
            used_symmetry = tfacts_symmetric(facts_t, tps)
        goal_atoms = ground_goal(goal.goal, tps, goal.guard, used_symmetry)
        if len(goal_atoms) > cap:
            raise SizeLimit(f"goal grounding has {len(goal_atoms)} atoms (cap {cap})")
        if stratified:
            f2, r2 = encode_stratified_goal(goal_atoms, goal.goal.pred)
            program_facts += f2
            rules += r2
        elif not goal_atoms:
            program_facts.append(FreeAtom(GOAL))
        else:
            rules.append(Rule(FreeAtom(GOAL), tuple(goal_atoms)))
    comments = {name: str(p.template()) for name, p in preds.items()}
    program = DatalogProgram(tuple(program_facts), tuple(rules), GOAL, comments)
    return HammerResult(program, preds, facts_t, goal_atoms, used_symmetry)
