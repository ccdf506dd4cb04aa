"""Brute-force reference deciders.

``oracle_decide`` solves a ground abstraction propositionally: theory atoms
are evaluated at the test-point values, Horn instances are saturated by unit
propagation and everything else is decided by enumerating truth assignments.

``direct_decide`` avoids the test-point machinery altogether.  It grounds
the clauses over its own sample of rationals (every relevant constant plus
several values in each gap) and evaluates the conjecture on the least model.
"""

from __future__ import annotations

import itertools
import os
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import TooLarge, UnsupportedFragment
from .formula import And, Conjecture, Formula, Not, Problem, TheoryConj, evaluate, substitute, theory_atoms
from .hammer import GroundAbstraction, TheoryPredicate
from .logic import (
    BoolAtom,
    Clause,
    FreeAtom,
    Num,
    Point,
    TheoryAtom,
    Var,
    bound_parts,
    simplify_theory_atom,
)
from .testpoints import TestPointSet

DEFAULT_MAX_ATOMS = 20
_CHUNK = 1 << 16


def max_atoms() -> int:
    return int(os.environ.get("SLR_HAMMER_MAX_ATOMS", DEFAULT_MAX_ATOMS))


@dataclass
class GroundProblem:
    """Propositional view: clauses over atom ids plus one extra formula."""

    atoms: list[FreeAtom]
    clauses: list[tuple[tuple[int, ...], tuple[int, ...]]]  # (negative ids, positive ids)
    formula: tuple
    empty_clause: bool = False


@dataclass
class OracleResult:
    satisfiable: bool
    model: frozenset[FreeAtom] | None
    method: str


def _compile(f: Formula, ids, theory) -> tuple:
    if isinstance(f, FreeAtom):
        return ("atom", ids(f))
    if isinstance(f, Not):
        return ("not", ids(f.atom))
    if isinstance(f, TheoryConj):
        return ("const", all(theory(a) for a in f.atoms))
    kind = "and" if isinstance(f, And) else "or"
    parts = []
    for c in f.children:
        p = _compile(c, ids, theory)
        if p[0] == "const":
            if p[1] == (kind == "or"):
                return ("const", kind == "or")
            continue
        parts.append(p)
    if not parts:
        return ("const", kind == "and")
    return parts[0] if len(parts) == 1 else (kind, tuple(parts))


def build_ground_problem(clauses: Iterable[Clause], formula: Formula, theory,
                         atoms: Iterable[FreeAtom] = ()) -> GroundProblem:
    """Evaluate theory atoms with ``theory`` and number the free ground atoms.

    ``atoms`` are numbered first, in the given order, even if no clause
    instance keeps them.
    """
    index: dict[FreeAtom, int] = {}
    atoms = list(dict.fromkeys(atoms))
    index.update((a, i) for i, a in enumerate(atoms))

    def ids(a: FreeAtom) -> int:
        i = index.get(a)
        if i is None:
            i = index[a] = len(atoms)
            atoms.append(a)
        return i

    out = []
    empty = False
    seen = set()
    for c in clauses:
        if not all(theory(a) for a in c.constraint):
            continue
        neg = tuple(sorted({ids(l.atom) for l in c.literals if not l.positive}))
        pos = tuple(sorted({ids(l.atom) for l in c.literals if l.positive}))
        if set(neg) & set(pos):
            continue
        if not neg and not pos:
            empty = True
        if (neg, pos) not in seen:
            seen.add((neg, pos))
            out.append((neg, pos))
    return GroundProblem(atoms, out, _compile(formula, ids, theory), empty)


def _beta_theory(beta: Mapping[Point, Fraction]):
    def theory(a) -> bool:
        if isinstance(a, BoolAtom):
            return a.value
        return a.evaluate(beta)
    return theory


def ground_problem(psi: GroundAbstraction) -> GroundProblem:
    atoms = sorted(psi.atoms(), key=lambda a: (a.pred, [p.name for p in a.args]))
    return build_ground_problem(psi.ground_clauses, psi.negated_conjecture, _beta_theory(psi.test_points.beta), atoms)


def least_model(n_atoms: int, clauses: Sequence[tuple[tuple[int, ...], tuple[int, ...]]]) -> set[int] | None:
    """Least model of ground Horn clauses, or None if a headless clause fires."""
    waiting: dict[int, list[int]] = defaultdict(list)
    missing = []
    queue = []
    true: set[int] = set()
    for k, (neg, pos) in enumerate(clauses):
        missing.append(len(neg))
        for a in neg:
            waiting[a].append(k)
        if not neg:
            if not pos:
                return None
            queue.append(pos[0])
    while queue:
        a = queue.pop()
        if a in true:
            continue
        true.add(a)
        for k in waiting.get(a, ()):
            missing[k] -= 1
            if missing[k] == 0:
                pos = clauses[k][1]
                if not pos:
                    return None
                if pos[0] not in true:
                    queue.append(pos[0])
    return true


def _eval_scalar(f: tuple, true: set[int]) -> bool:
    kind = f[0]
    if kind == "const":
        return f[1]
    if kind == "atom":
        return f[1] in true
    if kind == "not":
        return f[1] not in true
    if kind == "and":
        return all(_eval_scalar(c, true) for c in f[1])
    return any(_eval_scalar(c, true) for c in f[1])


def _antimonotone(f: tuple) -> bool:
    if f[0] == "atom":
        return False
    if f[0] in ("and", "or"):
        return all(_antimonotone(c) for c in f[1])
    return True


def _eval_vec(f: tuple, bits) -> np.ndarray:
    kind = f[0]
    if kind == "const":
        return np.full(bits.shape[1], f[1])
    if kind == "atom":
        return bits[f[1]]
    if kind == "not":
        return ~bits[f[1]]
    parts = [_eval_vec(c, bits) for c in f[1]]
    return np.logical_and.reduce(parts) if kind == "and" else np.logical_or.reduce(parts)


def solve(gp: GroundProblem, limit: int | None = None) -> OracleResult:
    if gp.empty_clause:
        return OracleResult(False, None, "trivial")
    horn = all(len(pos) <= 1 for _, pos in gp.clauses)
    if horn and _antimonotone(gp.formula):
        true = least_model(len(gp.atoms), gp.clauses)
        if true is None or not _eval_scalar(gp.formula, true):
            return OracleResult(False, None, "horn")
        return OracleResult(True, frozenset(gp.atoms[i] for i in true), "horn")
    return enumerate_assignments(gp, limit)


def enumerate_assignments(gp: GroundProblem, limit: int | None = None) -> OracleResult:
    """Exhaustive search over all truth assignments of the occurring atoms."""
    limit = max_atoms() if limit is None else limit
    n = len(gp.atoms)
    if n > limit:
        raise TooLarge(f"{n} ground atoms exceed the enumeration limit of {limit}")
    if gp.empty_clause:
        return OracleResult(False, None, "enumeration")
    total = 1 << n
    shifts = np.arange(n, dtype=np.int64)[:, None]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        bits = ((idx[None, :] >> shifts) & 1).astype(bool)
        ok = _eval_vec(gp.formula, bits)
        for neg, pos in gp.clauses:
            sat = np.zeros(idx.shape[0], dtype=bool)
            for a in pos:
                sat |= bits[a]
            for a in neg:
                sat |= ~bits[a]
            ok &= sat
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            word = int(idx[hits[0]])
            return OracleResult(True, frozenset(gp.atoms[i] for i in range(n) if word >> i & 1), "enumeration")
    return OracleResult(False, None, "enumeration")


def oracle_decide(psi: GroundAbstraction, limit: int | None = None) -> OracleResult:
    """Satisfiability of a ground abstraction; satisfiable means not entailed."""
    return solve(ground_problem(psi), limit)


# -- test-point independent reference ------------------------------------

def _numbers(clauses: Iterable[Clause], atoms: Iterable) -> set[Fraction]:
    found: set[Fraction] = set()
    for c in clauses:
        for a in c.constraint:
            if isinstance(a, TheoryAtom):
                found.add(a.linear()[2])
        for l in c.literals:
            found |= {x.value for x in l.atom.args if isinstance(x, Num)}
    for a in atoms:
        if isinstance(a, TheoryAtom):
            found.add(a.linear()[2])
    return found


def sample_domain(clauses: Sequence[Clause], extra_atoms: Sequence = (), per_gap: int = 2,
                  cap: int = 10**6) -> list[Fraction]:
    """Rationals covering every constant a bound can mention, plus ``per_gap`` values per gap.

    Every variable subset of every theory atom is instantiated with every
    constant of the problem; each resulting bound's constant is kept.
    """
    numbers = sorted(_numbers(clauses, extra_atoms))
    consts = set(numbers)
    atoms = [a for c in clauses for a in c.constraint if isinstance(a, TheoryAtom)]
    atoms += [a for a in extra_atoms if isinstance(a, TheoryAtom)]
    work = 0
    for atom in dict.fromkeys(atoms):
        vs = atom.vars()
        for r in range(len(vs) + 1):
            for subset in itertools.combinations(vs, r):
                for values in itertools.product(numbers, repeat=r):
                    work += 1
                    if work > cap:
                        raise TooLarge("sample domain construction exceeds its budget")
                    s = simplify_theory_atom(atom, {v: Num(c) for v, c in zip(subset, values)})
                    b = bound_parts(s) if isinstance(s, TheoryAtom) else None
                    if b is not None:
                        consts.add(b[2])
    ks = sorted(consts)
    if not ks:
        return [Fraction(j) for j in range(per_gap)]
    dom = list(ks)
    for a, b in zip(ks, ks[1:]):
        dom += [a + (b - a) * Fraction(j, per_gap + 1) for j in range(1, per_gap + 1)]
    dom += [ks[0] - j for j in range(1, per_gap + 1)]
    dom += [ks[-1] + j for j in range(1, per_gap + 1)]
    return sorted(dom)


def _exact_theory(a) -> bool:
    s = simplify_theory_atom(a)
    if not isinstance(s, BoolAtom):
        raise ValueError(f"theory atom {a} is not ground")
    return s.value


@dataclass
class DirectResult:
    entailed: bool
    satisfiable: bool
    domain: list[Fraction]


def direct_decide(problem: Problem, cap: int = 2 * 10**6) -> DirectResult:
    """Reference verdict for Horn problems with positive conjectures.

    ``entailed`` is the conjecture verdict (for a plain satisfiability check
    it means unsatisfiable).
    """
    conj = problem.conjecture
    if not problem.is_horn() or (conj is not None and not conj.positive):
        raise UnsupportedFragment("the direct oracle needs Horn clauses and a positive conjecture")
    m = max(1, len(conj.variables)) if conj and conj.kind == "forall" else 1
    extra = theory_atoms(conj.body) if conj else []
    domain = sample_domain(problem.clauses, extra, per_gap=m + 1)
    values = [Num(v) for v in domain]
    total = sum(len(values) ** len(c.vars()) for c in problem.clauses)
    if total > cap:
        raise TooLarge(f"direct grounding would need {total} instances")
    ground = []
    for c in problem.clauses:
        vs = c.vars()
        for combo in itertools.product(values, repeat=len(vs)):
            ground.append(c.substitute(dict(zip(vs, combo))))
    gp = build_ground_problem(ground, And(()), _exact_theory)
    true = None if gp.empty_clause else least_model(len(gp.atoms), gp.clauses)
    if true is None:
        return DirectResult(True, False, domain)
    model = {gp.atoms[i] for i in true}
    if conj is None:
        return DirectResult(False, True, domain)
    holds = model.__contains__
    results = (evaluate(substitute(conj.body, dict(zip(conj.variables, combo))), holds)
               for combo in itertools.product(values, repeat=len(conj.variables)))
    entailed = all(results) if conj.kind == "forall" else any(results)
    return DirectResult(entailed, True, domain)


# -- certificates ---------------------------------------------------------

def check_model(clauses: Iterable[Clause], conjecture: Conjecture | None, tps: TestPointSet,
                interpretation: Iterable[FreeAtom]) -> bool:
    """Whether an interpretation over the test points satisfies every clause
    instance and refutes the conjecture."""
    true = set(interpretation)
    theory = _beta_theory(tps.beta)
    points = tps.all_points()
    for c in clauses:
        vs = c.vars()
        for combo in itertools.product(points, repeat=len(vs)):
            g = c.substitute(dict(zip(vs, combo)))
            if not all(theory(a) for a in g.constraint):
                continue
            if not any((l.atom in true) == l.positive for l in g.literals):
                return False
    if conjecture is None:
        return True
    outcomes = (evaluate(substitute(conjecture.body, dict(zip(conjecture.variables, combo))), true.__contains__, theory)
                for combo in itertools.product(points, repeat=len(conjecture.variables)))
    if conjecture.kind == "forall":
        return not all(outcomes)
    return not any(outcomes)


def recheck_tfacts(preds: Mapping[str, TheoryPredicate], tps: TestPointSet, facts: Iterable[FreeAtom]) -> bool:
    """Exhaustive soundness and completeness check of tabulated theory facts."""
    have = set(facts)
    points = tps.all_points()
    for name, p in preds.items():
        template = p.template()
        vs = [Var(f"V{i}") for i in range(p.arity)]
        for combo in itertools.product(points, repeat=p.arity):
            inst = simplify_theory_atom(template, {v: Num(tps.beta[a]) for v, a in zip(vs, combo)})
            if (inst.value if isinstance(inst, BoolAtom) else None) != (FreeAtom(name, combo) in have):
                return False
    return True
