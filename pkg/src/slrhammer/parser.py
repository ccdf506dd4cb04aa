"""Reader and printer for the ``.slr`` problem format.

One statement per ``.``-terminated sentence, ``%`` starts a comment::

    declare P/1.
    fact IgnTable(0, 13, 880, 1100, 2200).
    clause x <= 1 || P(x).
    clause 0 <= x, x <= 2 || !P(x) \\/ Q(x).
    clause x > 1 || P(x) -> false.
    conjecture forall x. (0 <= x, x <= 1 || Q(x)).

In a clause, ``Lambda || C`` lists the constraint before ``||`` and the
free literals after it; literals are separated by ``,`` or ``\\/``.  A
theory atom in literal position is moved into the constraint complemented.
``B1, B2 -> H`` is accepted as the implication ``!B1 \\/ !B2 \\/ H``.

Conjecture bodies combine atoms with ``/\\`` and ``\\/``; the clause form
``(Lambda || C)`` abbreviates the disjunction of the complemented
constraint atoms and the literals of ``C``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ArityMismatch, NonLinear, NonPositiveConjecture, ParseError
from .formula import (
    BOTTOM,
    TOP,
    And,
    Conjecture,
    Formula,
    Not,
    Or,
    Problem,
    TheoryConj,
    formula_vars,
    is_positive,
    make_and,
    make_or,
    negate,
)
from .logic import (
    FALSE,
    TRUE,
    BoolAtom,
    Clause,
    FreeAtom,
    Literal,
    Num,
    TheoryAtom,
    Var,
    abstract_clause,
    make_expr,
)

_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<num>\d+(?:/\d+)?)
      | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<op>\|\||\\/|/\\|->|<=|>=|!=|<|>|=|!|\(|\)|,|\.|\+|-|\*|/)
    """,
    re.VERBOSE,
)
_COMPARISONS = {"<=", "<", "!=", "=", ">", ">="}
RESERVED = {"goal", "missing", "expected"}
_KEYWORDS = {"true", "false"}


def check_predicate_name(name: str, line: int = 0, col: int = 0) -> None:
    if name in RESERVED or name.startswith("_") or name.startswith("t_"):
        raise ParseError(f"predicate name {name!r} is reserved", line, col)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.line}:{self.col}"


def tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# Items of a comma/disjunction separated list before its role is known.
class _Neg:
    def __init__(self, atom):
        self.atom = atom


_FALSE_ITEM = object()


def _tidy(f: Formula) -> Formula:
    """Splice nested And/Or nodes of the same kind and unwrap singletons."""
    if isinstance(f, (And, Or)) and f.children:
        kids = [_tidy(c) for c in f.children]
        return make_and(kids) if isinstance(f, And) else make_or(kids)
    return f


class _Parser:
    def __init__(self, text: str, allow_negative: bool):
        self.toks = tokenize(text)
        self.i = 0
        self.allow_negative = allow_negative
        self.arities: dict[str, int] = {}

    # -- token helpers -------------------------------------------------
    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        return ParseError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def at_keyword(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "id" and t.text == word and not (self.peek(1).kind == "op" and self.peek(1).text == "(")

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.peek().text or 'end of input'!r}")
        return self.next()

    # -- terms ---------------------------------------------------------
    def note_arity(self, name: str, n: int, tok: _Tok):
        known = self.arities.setdefault(name, n)
        if known != n:
            raise ArityMismatch(f"{name} used with arity {n}, previously {known}", tok.line, tok.col)

    def free_atom(self) -> FreeAtom:
        tok = self.next()
        check_predicate_name(tok.text, tok.line, tok.col)
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.argument())
                if not self.at(","):
                    break
                self.next()
        self.expect(")")
        self.note_arity(tok.text, len(args), tok)
        return FreeAtom(tok.text, tuple(args))

    def argument(self):
        neg = False
        if self.at("-"):
            self.next()
            neg = True
        t = self.next()
        if t.kind == "num":
            v = Fraction(t.text)
            return Num(-v if neg else v)
        if t.kind == "id" and not neg:
            return Var(t.text)
        raise self.error("expected a variable or a number", t)

    def expr(self):
        coeffs, const = self.term()
        while self.at("+") or self.at("-"):
            sign = 1 if self.next().text == "+" else -1
            c2, k2 = self.term()
            const += sign * k2
            for v, k in c2.items():
                coeffs[v] = coeffs.get(v, Fraction(0)) + sign * k
        return coeffs, const

    def term(self):
        sign = 1
        while self.at("-"):
            self.next()
            sign = -sign
        coeffs, const = self.factor()
        while self.at("*"):
            tok = self.next()
            c2, k2 = self.factor()
            if coeffs and c2:
                raise NonLinear("product of two variables", tok.line, tok.col)
            if coeffs:
                coeffs, const = {v: k * k2 for v, k in coeffs.items()}, const * k2
            else:
                coeffs, const = {v: k * const for v, k in c2.items()}, const * k2
        return {v: sign * k for v, k in coeffs.items()}, sign * const

    def factor(self):
        t = self.next()
        if t.kind == "num":
            return {}, Fraction(t.text)
        if t.kind == "id":
            return {Var(t.text): Fraction(1)}, Fraction(0)
        if t.kind == "op" and t.text == "(":
            res = self.expr()
            self.expect(")")
            return res
        raise self.error("expected an arithmetic term", t)

    def theory_atom(self) -> TheoryAtom:
        lhs = make_expr(*self.expr())
        t = self.next()
        if t.kind != "op" or t.text not in _COMPARISONS:
            raise self.error("expected a comparison operator", t)
        rhs = make_expr(*self.expr())
        return TheoryAtom(lhs, t.text, rhs)

    def is_free_atom_ahead(self) -> bool:
        return self.peek().kind == "id" and self.peek(1).kind == "op" and self.peek(1).text == "("

    # -- clause lists --------------------------------------------------
    def item(self):
        if self.at_keyword("false"):
            self.next()
            return _FALSE_ITEM
        if self.at_keyword("true"):
            self.next()
            return TRUE
        if self.at("!"):
            self.next()
            if self.is_free_atom_ahead():
                return _Neg(self.free_atom())
            return self.theory_atom().complement()
        if self.is_free_atom_ahead():
            return self.free_atom()
        return self.theory_atom()

    def items(self):
        out = [self.item()]
        while self.at(",") or self.at("\\/"):
            self.next()
            out.append(self.item())
        return out

    def clause(self) -> Clause:
        start = self.peek()
        constraint: list = []
        literals: list[Literal] = []
        first = [] if self.at("||") else self.items()
        if self.at("||"):
            self.next()
            for it in first:
                if isinstance(it, (TheoryAtom, BoolAtom)):
                    constraint.append(it)
                elif it is _FALSE_ITEM:
                    constraint.append(FALSE)
                else:
                    raise self.error("free literal before '||'", start)
            rest = [] if self.at(".") else self.items()
        else:
            rest = first
        if self.at("->"):
            self.next()
            for it in rest:
                if isinstance(it, FreeAtom):
                    literals.append(Literal(it, False))
                elif isinstance(it, (TheoryAtom, BoolAtom)):
                    constraint.append(it)
                elif it is not _FALSE_ITEM:
                    raise self.error("negated atom in implication body", start)
            rest = self.items()
        for it in rest:
            if isinstance(it, FreeAtom):
                literals.append(Literal(it, True))
            elif isinstance(it, _Neg):
                literals.append(Literal(it.atom, False))
            elif isinstance(it, TheoryAtom):
                constraint.append(it.complement())
            elif it == TRUE:
                constraint.append(FALSE)
        return abstract_clause(Clause(tuple(constraint), tuple(literals)))

    # -- conjecture formulas -------------------------------------------
    def clause_form_ahead(self) -> bool:
        depth = 0
        k = self.i
        while k < len(self.toks):
            t = self.toks[k]
            if t.kind == "eof":
                return False
            if t.kind == "op":
                if t.text == "(":
                    depth += 1
                elif t.text == ")":
                    if depth == 0:
                        return False
                    depth -= 1
                elif t.text == "." and depth == 0:
                    return False
                elif t.text in ("||", "->") and depth == 0:
                    return True
            k += 1
        return False

    def body(self) -> Formula:
        if self.clause_form_ahead():
            return self.clause_formula()
        return self.disjunction()

    def clause_formula(self) -> Formula:
        parts: list[Formula] = []
        first = [] if self.at("||") else self.items()
        if self.at("||"):
            self.next()
            for it in first:
                if isinstance(it, TheoryAtom):
                    parts.append(TheoryConj((it.complement(),)))
                elif isinstance(it, BoolAtom):
                    if not it.value:
                        return TOP
                elif it is _FALSE_ITEM:
                    return TOP
                else:
                    raise self.error("free literal before '||'")
            rest = [] if self.at(")") or self.at(".") else self.items()
        else:
            rest = first
        if self.at("->"):
            self.next()
            for it in rest:
                if isinstance(it, FreeAtom):
                    parts.append(Not(it))
                elif isinstance(it, TheoryAtom):
                    parts.append(TheoryConj((it.complement(),)))
            rest = self.items()
        for it in rest:
            if isinstance(it, FreeAtom):
                parts.append(it)
            elif isinstance(it, _Neg):
                parts.append(Not(it.atom))
            elif isinstance(it, TheoryAtom):
                parts.append(TheoryConj((it,)))
            elif it == TRUE:
                return TOP
        return make_or(parts) if parts else BOTTOM

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.at("\\/"):
            self.next()
            parts.append(self.conjunction())
        return make_or(parts)

    def conjunction(self) -> Formula:
        parts = [self.unit()]
        while self.at("/\\"):
            self.next()
            parts.append(self.unit())
        return make_and(parts)

    def unit(self) -> Formula:
        if self.at_keyword("true"):
            self.next()
            return TOP
        if self.at_keyword("false"):
            self.next()
            return BOTTOM
        if self.at("!"):
            self.next()
            if self.is_free_atom_ahead():
                return Not(self.free_atom())
            if self.at("("):
                # negation moves inward; theory atoms are complemented
                return _tidy(negate(self.unit()))
            return TheoryConj((self.theory_atom().complement(),))
        if self.is_free_atom_ahead():
            return self.free_atom()
        if self.at("("):
            mark = self.i
            self.next()
            try:
                inner = self.body()
                self.expect(")")
                return inner
            except ParseError:
                self.i = mark
        return TheoryConj((self.theory_atom(),))

    def conjecture(self) -> Conjecture:
        q = self.next()
        if q.kind != "id" or q.text not in ("forall", "exists"):
            raise self.error("expected 'forall' or 'exists'", q)
        variables = []
        while self.peek().kind == "id":
            variables.append(Var(self.next().text))
            if not self.at(","):
                break
            self.next()
        self.expect(".")
        body = self.body()
        used = set(formula_vars(body))
        if used != set(variables):
            raise self.error(
                f"conjecture variables {sorted(v.name for v in variables)} do not match "
                f"the variables of its body {sorted(v.name for v in used)}",
                q,
            )
        if len(set(variables)) != len(variables):
            raise self.error("repeated conjecture variable", q)
        if not self.allow_negative and not is_positive(body):
            raise NonPositiveConjecture(f"{q.line}:{q.col}: conjecture has a negative free literal")
        return Conjecture(q.text, tuple(variables), body)

    # -- statements ----------------------------------------------------
    def problem(self) -> Problem:
        clauses: list[Clause] = []
        conjecture = None
        while self.peek().kind != "eof":
            kw = self.next()
            if kw.kind != "id":
                raise self.error("expected a statement keyword", kw)
            if kw.text == "clause":
                clauses.append(self.clause())
            elif kw.text == "fact":
                if not self.is_free_atom_ahead():
                    raise self.error("expected an atom")
                atom = self.free_atom()
                if not atom.is_ground():
                    raise self.error("facts must be ground", kw)
                clauses.append(abstract_clause(Clause((), (Literal(atom, True),))))
            elif kw.text == "conjecture":
                if conjecture is not None:
                    raise self.error("only one conjecture is allowed", kw)
                conjecture = self.conjecture()
            elif kw.text == "declare":
                name = self.next()
                if name.kind != "id":
                    raise self.error("expected a predicate name", name)
                check_predicate_name(name.text, name.line, name.col)
                self.expect("/")
                n = self.next()
                if n.kind != "num" or "/" in n.text:
                    raise self.error("expected an arity", n)
                self.note_arity(name.text, int(n.text), name)
            else:
                raise self.error(f"unknown statement {kw.text!r}", kw)
            self.expect(".")
        return Problem(tuple(clauses), conjecture, dict(self.arities))


def parse_problem(text: str, allow_negative: bool = False) -> Problem:
    """Parse a problem; clauses come back abstracted.

    Negative free literals in the conjecture raise NonPositiveConjecture
    unless ``allow_negative`` is set.
    """
    return _Parser(text, allow_negative).problem()


def parse_clause(text: str) -> Clause:
    p = _Parser(text.rstrip().rstrip("."), True)
    c = p.clause()
    if p.peek().kind != "eof":
        raise p.error("trailing input")
    return c


def parse_formula(text: str) -> Formula:
    p = _Parser(text, True)
    f = p.body()
    if p.peek().kind != "eof":
        raise p.error("trailing input")
    return f


def format_clause(c: Clause) -> str:
    return str(c)


def format_formula(f: Formula) -> str:
    if isinstance(f, FreeAtom):
        return str(f)
    if isinstance(f, Not):
        return f"!{f.atom}"
    if isinstance(f, TheoryConj):
        if not f.atoms:
            return "true"
        if len(f.atoms) == 1:
            return str(f.atoms[0])
        return "(" + " /\\ ".join(map(str, f.atoms)) + ")"
    if isinstance(f, And):
        return "(" + " /\\ ".join(map(format_formula, f.children)) + ")" if f.children else "true"
    return "(" + " \\/ ".join(map(format_formula, f.children)) + ")" if f.children else "false"


def print_problem(p: Problem) -> str:
    lines = [f"declare {name}/{n}." for name, n in sorted(p.arities.items())]
    lines += [f"clause {c}." for c in p.clauses]
    if p.conjecture:
        c = p.conjecture
        vs = ", ".join(v.name for v in c.variables)
        lines.append(f"conjecture {c.kind}{' ' + vs if vs else ''}. {format_formula(c.body)}.")
    return "\n".join(lines) + "\n"
