"""Terms, atoms and constrained clauses.

A clause ``Lambda || C`` pairs a conjunction of linear arithmetic atoms over
the rationals with a disjunction of free (uninterpreted) literals and reads
as ``Lambda -> C``.  All arithmetic is exact; constants are Fractions.

Free atoms may only take variables, numeric constants and test-point
constants as arguments.  Linear expressions live exclusively inside theory
atoms.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import NotComplementary

OPS = ("<=", "<", "!=", "=", ">", ">=")

_COMPARE = {
    "<=": operator.le,
    "<": operator.lt,
    "!=": operator.ne,
    "=": operator.eq,
    ">": operator.gt,
    ">=": operator.ge,
}
# a op b  <=>  not (a NEGATED[op] b)
NEGATED = {"<=": ">", "<": ">=", "!=": "=", "=": "!=", ">": "<=", ">=": "<"}
# a op b  <=>  b MIRRORED[op] a
MIRRORED = {"<=": ">=", "<": ">", "!=": "!=", "=": "=", ">": "<", ">=": "<="}


def compare(lhs: Fraction, op: str, rhs: Fraction) -> bool:
    return _COMPARE[op](lhs, rhs)


def fmt_number(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, order=True)
class Num:
    value: Fraction

    def __post_init__(self):
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    def __str__(self) -> str:
        return fmt_number(self.value)


@dataclass(frozen=True, order=True)
class Point:
    """A symbolic constant standing for one test point."""

    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Num, Point]
Symbol = Union[Var, Point]


def _symbol_key(t: Symbol):
    return (0 if isinstance(t, Var) else 1, t.name)


@dataclass(frozen=True)
class Lin:
    """Linear expression ``sum(coef * symbol) + const``; coefficients are nonzero."""

    terms: tuple[tuple[Symbol, Fraction], ...]
    const: Fraction = Fraction(0)

    @staticmethod
    def build(coeffs: Mapping[Symbol, Fraction], const=Fraction(0)) -> "Lin":
        items = tuple(sorted(((t, Fraction(k)) for t, k in coeffs.items() if k != 0), key=lambda p: _symbol_key(p[0])))
        return Lin(items, Fraction(const))

    def __str__(self) -> str:
        parts = []
        for t, k in self.terms:
            mag = abs(k)
            body = str(t) if mag == 1 else f"{fmt_number(mag)}*{t}"
            if not parts:
                parts.append(body if k > 0 else f"-{body}")
            else:
                parts.append(("+ " if k > 0 else "- ") + body)
        if self.const or not parts:
            if not parts:
                parts.append(fmt_number(self.const))
            else:
                parts.append(("+ " if self.const > 0 else "- ") + fmt_number(abs(self.const)))
        return " ".join(parts)


Expr = Union[Var, Num, Point, Lin]


def linear_parts(expr: Expr) -> tuple[dict[Symbol, Fraction], Fraction]:
    if isinstance(expr, Num):
        return {}, expr.value
    if isinstance(expr, (Var, Point)):
        return {expr: Fraction(1)}, Fraction(0)
    return dict(expr.terms), expr.const


def make_expr(coeffs: Mapping[Symbol, Fraction], const: Fraction) -> Expr:
    """Smallest expression node denoting the given linear form."""
    coeffs = {t: k for t, k in coeffs.items() if k != 0}
    if not coeffs:
        return Num(const)
    if len(coeffs) == 1 and const == 0:
        (t, k), = coeffs.items()
        if k == 1:
            return t
    return Lin.build(coeffs, const)


def substitute_expr(expr: Expr, sigma: Mapping[Var, Term]) -> Expr:
    if isinstance(expr, Var):
        return sigma.get(expr, expr)
    if isinstance(expr, Lin):
        if not any(t in sigma for t, _ in expr.terms):
            return expr
        coeffs: dict[Symbol, Fraction] = {}
        const = expr.const
        for t, k in expr.terms:
            sub = sigma.get(t, t) if isinstance(t, Var) else t
            c2, k2 = linear_parts(sub)
            const += k * k2
            for s, j in c2.items():
                coeffs[s] = coeffs.get(s, Fraction(0)) + k * j
        return make_expr(coeffs, const)
    return expr


def expr_symbols(expr: Expr) -> list[Symbol]:
    if isinstance(expr, (Var, Point)):
        return [expr]
    if isinstance(expr, Lin):
        return [t for t, _ in expr.terms]
    return []


@dataclass(frozen=True)
class BoolAtom:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"

    def vars(self) -> tuple[Var, ...]:
        return ()

    def substitute(self, sigma) -> "BoolAtom":
        return self


TRUE = BoolAtom(True)
FALSE = BoolAtom(False)


@dataclass(frozen=True)
class TheoryAtom:
    lhs: Expr
    op: str
    rhs: Expr

    def __post_init__(self):
        if self.op not in _COMPARE:
            raise ValueError(f"unknown comparison {self.op!r}")

    def __str__(self) -> str:
        return f"{self.lhs} {self.op} {self.rhs}"

    def symbols(self) -> list[Symbol]:
        seen: dict[Symbol, None] = {}
        for t in expr_symbols(self.lhs) + expr_symbols(self.rhs):
            seen.setdefault(t)
        return list(seen)

    def vars(self) -> tuple[Var, ...]:
        return tuple(t for t in self.symbols() if isinstance(t, Var))

    def substitute(self, sigma: Mapping[Var, Term]) -> "TheoryAtom":
        return TheoryAtom(substitute_expr(self.lhs, sigma), self.op, substitute_expr(self.rhs, sigma))

    def complement(self) -> "TheoryAtom":
        return TheoryAtom(self.lhs, NEGATED[self.op], self.rhs)

    def linear(self) -> tuple[dict[Symbol, Fraction], str, Fraction]:
        """Return ``(coeffs, op, c)`` with the atom equivalent to ``sum(coeffs) op c``."""
        c1, k1 = linear_parts(self.lhs)
        c2, k2 = linear_parts(self.rhs)
        coeffs = dict(c1)
        for t, k in c2.items():
            coeffs[t] = coeffs.get(t, Fraction(0)) - k
        return {t: k for t, k in coeffs.items() if k != 0}, self.op, k2 - k1

    def evaluate(self, values: Mapping[Symbol, Fraction]) -> bool:
        coeffs, op, c = self.linear()
        return compare(sum((k * values[t] for t, k in coeffs.items()), Fraction(0)), op, c)

    def is_bound(self) -> bool:
        """A single symbol compared against a number."""
        return isinstance(self.lhs, (Var, Point)) and isinstance(self.rhs, Num)


Constraint = Union[TheoryAtom, BoolAtom]


def simplify_theory_atom(atom: Constraint, partial: Mapping[Var, Term] | None = None) -> Constraint:
    """Substitute and normalise a theory atom.

    The result is TRUE, FALSE, a bound ``x op c``, a comparison ``x op y`` or,
    outside the supported fragment, a general linear atom ``expr op c``.
    """
    if isinstance(atom, BoolAtom):
        return atom
    if partial:
        atom = atom.substitute(partial)
    coeffs, op, c = atom.linear()
    if not coeffs:
        return TRUE if compare(Fraction(0), op, c) else FALSE
    items = sorted(coeffs.items(), key=lambda p: _symbol_key(p[0]))
    if len(items) == 1:
        (t, k), = items
        if k < 0:
            op = MIRRORED[op]
        return TheoryAtom(t, op, Num(c / k))
    if len(items) == 2 and c == 0 and items[0][1] == -items[1][1]:
        (t1, k1), (t2, _) = items
        left, right = (t1, t2) if k1 > 0 else (t2, t1)
        if op in ("=", "!=") and _symbol_key(right) < _symbol_key(left):
            left, right = right, left
        return TheoryAtom(left, op, right)
    return TheoryAtom(Lin.build(coeffs), op, Num(c))


def bound_parts(atom: TheoryAtom) -> tuple[Symbol, str, Fraction] | None:
    """View a simplified atom as ``symbol op value`` if it is a bound."""
    if isinstance(atom, TheoryAtom) and atom.is_bound():
        return atom.lhs, atom.op, atom.rhs.value  # type: ignore[union-attr]
    return None


@dataclass(frozen=True)
class FreeAtom:
    pred: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        return f"{self.pred}({', '.join(map(str, self.args))})"

    def vars(self) -> tuple[Var, ...]:
        return tuple(dict.fromkeys(a for a in self.args if isinstance(a, Var)))

    def substitute(self, sigma: Mapping[Var, Term]) -> "FreeAtom":
        return FreeAtom(self.pred, tuple(sigma.get(a, a) if isinstance(a, Var) else a for a in self.args))

    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)


@dataclass(frozen=True)
class Literal:
    atom: FreeAtom
    positive: bool = True

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"!{self.atom}"

    @property
    def pred(self) -> str:
        return self.atom.pred

    def substitute(self, sigma) -> "Literal":
        return Literal(self.atom.substitute(sigma), self.positive)


@dataclass(frozen=True)
class Clause:
    constraint: tuple[Constraint, ...] = ()
    literals: tuple[Literal, ...] = ()

    def __str__(self) -> str:
        free = " \\/ ".join(map(str, self.literals)) or "false"
        if not self.constraint:
            return free
        return f"{', '.join(map(str, self.constraint))} || {free}"

    def vars(self) -> tuple[Var, ...]:
        seen: dict[Var, None] = {}
        for a in self.constraint:
            for v in a.vars():
                seen.setdefault(v)
        for lit in self.literals:
            for v in lit.atom.vars():
                seen.setdefault(v)
        return tuple(seen)

    @property
    def positive(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.literals if l.positive)

    @property
    def negative(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.literals if not l.positive)

    def is_horn(self) -> bool:
        return len(self.positive) <= 1

    def substitute(self, sigma: Mapping[Var, Term]) -> "Clause":
        return Clause(
            tuple(a.substitute(sigma) for a in self.constraint),
            tuple(l.substitute(sigma) for l in self.literals),
        )

    def predicates(self) -> set[str]:
        return {l.pred for l in self.literals}


def fresh_var(used: set[str], prefix: str = "_v") -> Var:
    k = 0
    while f"{prefix}{k}" in used:
        k += 1
    used.add(f"{prefix}{k}")
    return Var(f"{prefix}{k}")


def abstract_clause(clause: Clause) -> Clause:
    """Move every non-variable argument of a free literal into the constraint.

    Each such argument ``t`` becomes a fresh variable ``x`` together with the
    constraint atom ``x = t``.
    """
    if all(isinstance(a, Var) for l in clause.literals for a in l.atom.args):
        return clause
    used = {v.name for v in clause.vars()}
    extra: list[Constraint] = []
    lits = []
    for lit in clause.literals:
        args = []
        for a in lit.atom.args:
            if isinstance(a, Var):
                args.append(a)
            else:
                x = fresh_var(used)
                extra.append(TheoryAtom(x, "=", a))
                args.append(x)
        lits.append(Literal(FreeAtom(lit.atom.pred, tuple(args)), lit.positive))
    return Clause(clause.constraint + tuple(extra), tuple(lits))


Substitution = dict  # Var -> Term


def _walk(t: Term, sigma: Mapping[Var, Term]) -> Term:
    while isinstance(t, Var) and t in sigma:
        t = sigma[t]
    return t


def mgu(a: FreeAtom, b: FreeAtom) -> Substitution | None:
    """Most general unifier of two flat atoms, or None if there is none.

    The result is idempotent and only maps variables to terms already
    occurring in ``a`` or ``b``.
    """
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    sigma: dict[Var, Term] = {}
    for s, t in zip(a.args, b.args):
        s, t = _walk(s, sigma), _walk(t, sigma)
        if s == t:
            continue
        if isinstance(s, Var):
            sigma[s] = t
        elif isinstance(t, Var):
            sigma[t] = s
        else:
            return None
    return {v: _walk(t, sigma) for v, t in sigma.items()}


def rename_apart(clause: Clause, avoid: Iterable[Var]) -> Clause:
    avoid_names = {v.name for v in avoid}
    used = avoid_names | {v.name for v in clause.vars()}
    sigma = {}
    for v in clause.vars():
        if v.name in avoid_names:
            k = 1
            while f"{v.name}_{k}" in used:
                k += 1
            used.add(f"{v.name}_{k}")
            sigma[v] = Var(f"{v.name}_{k}")
    return clause.substitute(sigma) if sigma else clause


def simplify_clause(clause: Clause) -> Clause:
    """Normalise the constraint of a clause.

    Equations ``x = c`` are propagated into the other theory atoms; an
    equation is dropped once ``x`` no longer occurs in a free literal.  TRUE
    atoms disappear, a FALSE atom is kept as the only constraint.
    """
    free_vars = {v for l in clause.literals for v in l.atom.vars()}
    atoms = [simplify_theory_atom(a) for a in clause.constraint]
    while True:
        if any(a == FALSE for a in atoms):
            return Clause((FALSE,), clause.literals)
        atoms = [a for a in atoms if a != TRUE]
        eqs: dict[Var, Fraction] = {}
        conflict = False
        for a in atoms:
            b = bound_parts(a)
            if b and b[1] == "=" and isinstance(b[0], Var):
                if b[0] in eqs and eqs[b[0]] != b[2]:
                    conflict = True
                eqs.setdefault(b[0], b[2])
        if conflict:
            return Clause((FALSE,), clause.literals)
        sigma = {v: Num(c) for v, c in eqs.items()}
        changed = False
        out: list[Constraint] = []
        kept_defs: set[Var] = set()
        for a in atoms:
            b = bound_parts(a)
            if b and b[1] == "=" and b[0] in sigma:
                if b[0] in free_vars and b[0] not in kept_defs:
                    kept_defs.add(b[0])
                    out.append(a)
                else:
                    changed = True
                continue
            s = simplify_theory_atom(a, sigma)
            changed |= s != a
            out.append(s)
        atoms = out
        if not changed:
            return Clause(tuple(dict.fromkeys(atoms)), clause.literals)


def constraint_satisfiable(constraint: Iterable[Constraint]) -> bool:
    """Decide satisfiability for conjunctions of bounds.

    Atoms outside that shape are treated as satisfiable, so a False result
    is always definite.
    """
    lower: dict[Symbol, tuple[Fraction, bool]] = {}
    upper: dict[Symbol, tuple[Fraction, bool]] = {}
    excluded: dict[Symbol, set[Fraction]] = {}
    for a in constraint:
        a = simplify_theory_atom(a)
        if a == FALSE:
            return False
        b = bound_parts(a) if isinstance(a, TheoryAtom) else None
        if b is None:
            continue
        t, op, c = b
        if op == "!=":
            excluded.setdefault(t, set()).add(c)
            continue
        if op in (">", ">=", "="):
            strict = op == ">"
            cur = lower.get(t)
            if cur is None or c > cur[0] or (c == cur[0] and strict):
                lower[t] = (c, strict)
        if op in ("<", "<=", "="):
            strict = op == "<"
            cur = upper.get(t)
            if cur is None or c < cur[0] or (c == cur[0] and strict):
                upper[t] = (c, strict)
    for t in set(lower) | set(upper) | set(excluded):
        lo, hi = lower.get(t), upper.get(t)
        if lo and hi:
            if lo[0] > hi[0]:
                return False
            if lo[0] == hi[0]:
                if lo[1] or hi[1] or lo[0] in excluded.get(t, ()):
                    return False
    return True


def hierarchic_resolve(c1: Clause, i: int, c2: Clause, j: int) -> Clause:
    """Resolve literal ``i`` of ``c1`` with literal ``j`` of ``c2``.

    ``c2`` is renamed apart first.  The resolvent's constraint is simplified
    but may still be unsatisfiable; see :func:`constraint_satisfiable`.
    """
    c2 = rename_apart(c2, c1.vars())
    l1, l2 = c1.literals[i], c2.literals[j]
    if l1.positive == l2.positive:
        raise NotComplementary(f"{l1} and {l2} have the same sign")
    sigma = mgu(l1.atom, l2.atom)
    if sigma is None:
        raise NotComplementary(f"{l1.atom} and {l2.atom} do not unify")
    lits = c1.literals[:i] + c1.literals[i + 1:] + c2.literals[:j] + c2.literals[j + 1:]
    resolvent = Clause(c1.constraint + c2.constraint, tuple(dict.fromkeys(lits))).substitute(sigma)
    return simplify_clause(resolvent)
