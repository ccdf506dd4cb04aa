"""Text renderings of the hammered problems.

All writers are deterministic: the same input gives byte-identical output.
"""

from __future__ import annotations

from fractions import Fraction

from .datalog import export_datalog
from .errors import UnsupportedFormat
from .formula import And, Formula, Not, TheoryConj, walk
from .hammer import GroundAbstraction, HammerResult
from .logic import BoolAtom, Clause, FreeAtom, Num, Point, Var

DATALOG_FORMATS = ("datalog", "clauses")
GROUND_FORMATS = ("clauses", "smt")


def export_hammered(result: HammerResult, fmt: str) -> str:
    if fmt == "datalog":
        return export_datalog(result.program)
    if fmt == "clauses":
        return _hammered_clauses(result)
    raise UnsupportedFormat(f"unknown format {fmt!r}; choose one of {', '.join(DATALOG_FORMATS)}")


def _hammered_clauses(result: HammerResult) -> str:
    prog = result.program
    lines = ["% hammered Horn clauses (theory atoms replaced by fresh predicates)"]
    for pred in sorted(prog.comments):
        lines.append(f"% {pred}: {prog.comments[pred]}")
    for f in prog.facts:
        lines.append(f"fact {f}.")
    for r in prog.rules:
        lits = [f"!{a}" for a in r.body] + [f"~{a}" for a in r.negated]
        lits.append(str(r.head) if r.head.pred != prog.query else "false")
        lines.append("clause " + " \\/ ".join(lits) + ".")
    return "\n".join(lines) + "\n"


def export_ground(psi: GroundAbstraction, fmt: str) -> str:
    if fmt == "clauses":
        return _ground_clauses(psi)
    if fmt == "smt":
        return _ground_smt(psi)
    raise UnsupportedFormat(f"unknown format {fmt!r}; choose one of {', '.join(GROUND_FORMATS)}")


def _fmt_formula(f: Formula) -> str:
    if isinstance(f, FreeAtom):
        return str(f)
    if isinstance(f, Not):
        return f"!{f.atom}"
    if isinstance(f, TheoryConj):
        return "(" + " /\\ ".join(map(str, f.atoms)) + ")" if f.atoms else "true"
    op = " /\\ " if isinstance(f, And) else " \\/ "
    if not f.children:
        return "true" if isinstance(f, And) else "false"
    return "(" + op.join(_fmt_formula(c) for c in f.children) + ")"


def _ground_clauses(psi: GroundAbstraction) -> str:
    tps = psi.test_points
    lines = [f"% ground abstraction over {len(tps)} test points (m = {tps.m})"]
    for p in tps.all_points():
        lines.append(f"% {p} = {tps.label(p)}, value {tps.beta[p]}")
    lines.append("% idef")
    lines += [f"{a}." for a in psi.interval_bounds]
    lines.append("% ground clauses")
    lines += [f"{c}." for c in psi.ground_clauses]
    lines.append("% negated conjecture")
    lines.append(f"{_fmt_formula(psi.negated_conjecture)}.")
    return "\n".join(lines) + "\n"


def _smt_num(v: Fraction) -> str:
    body = str(abs(v.numerator)) if v.denominator == 1 else f"(/ {abs(v.numerator)} {v.denominator})"
    return f"(- {body})" if v < 0 else body


def _smt_expr(e) -> str:
    if isinstance(e, Num):
        return _smt_num(e.value)
    if isinstance(e, (Point, Var)):
        return e.name
    parts = [t.name if k == 1 else f"(* {_smt_num(k)} {t.name})" for t, k in e.terms]
    if e.const:
        parts.append(_smt_num(e.const))
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def _smt_theory(a) -> str:
    if isinstance(a, BoolAtom):
        return "true" if a.value else "false"
    lhs, rhs = _smt_expr(a.lhs), _smt_expr(a.rhs)
    if a.op == "!=":
        return f"(not (= {lhs} {rhs}))"
    return f"({a.op} {lhs} {rhs})"


def _smt_atom(a: FreeAtom) -> str:
    return a.pred if not a.args else f"({a.pred} {' '.join(x.name for x in a.args)})"


def _smt_formula(f: Formula) -> str:
    if isinstance(f, FreeAtom):
        return _smt_atom(f)
    if isinstance(f, Not):
        return f"(not {_smt_atom(f.atom)})"
    if isinstance(f, TheoryConj):
        if not f.atoms:
            return "true"
        parts = [_smt_theory(a) for a in f.atoms]
        return parts[0] if len(parts) == 1 else f"(and {' '.join(parts)})"
    if not f.children:
        return "true" if isinstance(f, And) else "false"
    kw = "and" if isinstance(f, And) else "or"
    return f"({kw} {' '.join(_smt_formula(c) for c in f.children)})"


def _smt_clause(c: Clause) -> str:
    parts = [f"(not {_smt_theory(a)})" for a in c.constraint]
    parts += [_smt_atom(l.atom) if l.positive else f"(not {_smt_atom(l.atom)})" for l in c.literals]
    if not parts:
        return "false"
    return parts[0] if len(parts) == 1 else f"(or {' '.join(parts)})"


def _ground_smt(psi: GroundAbstraction) -> str:
    tps = psi.test_points
    arities: dict[str, int] = {}
    for c in psi.ground_clauses:
        for l in c.literals:
            arities[l.pred] = len(l.atom.args)
    for node in walk(psi.negated_conjecture):
        if isinstance(node, FreeAtom):
            arities[node.pred] = len(node.args)
    lines = ["; ground abstraction", "(set-logic QF_UFLRA)"]
    for pred in sorted(arities):
        lines.append(f"(declare-fun {pred} ({' '.join(['Real'] * arities[pred])}) Bool)")
    for p in tps.all_points():
        lines.append(f"(declare-const {p.name} Real) ; {tps.label(p)}")
    lines.append("; idef")
    lines += [f"(assert {_smt_theory(a)})" for a in psi.interval_bounds]
    lines.append("; ground clauses")
    lines += [f"(assert {_smt_clause(c)})" for c in psi.ground_clauses]
    lines.append("; negated conjecture")
    lines.append(f"(assert {_smt_formula(psi.negated_conjecture)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
