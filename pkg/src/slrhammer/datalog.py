"""Datalog programs and their text format.

Rules read ``head(X0) :- b1(X0), ~b2(X0).``; variables are capitalised,
constants are lower-case identifiers or numbers, nullary atoms are written
without parentheses and ``%`` starts a comment.  A program ends with its
query line ``@query goal .``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .logic import FreeAtom, Point, Var

GOAL = "goal"


@dataclass(frozen=True)
class Rule:
    head: FreeAtom
    body: tuple[FreeAtom, ...] = ()
    negated: tuple[FreeAtom, ...] = ()

    def canonical(self) -> "Rule":
        """Variables renamed ``V0, V1, ...`` by first occurrence."""
        names: dict[Var, Var] = {}
        for atom in (self.head,) + self.body + self.negated:
            for a in atom.args:
                if isinstance(a, Var) and a not in names:
                    names[a] = Var(f"V{len(names)}")
        return Rule(
            self.head.substitute(names),
            tuple(a.substitute(names) for a in self.body),
            tuple(a.substitute(names) for a in self.negated),
        )

    def __str__(self) -> str:
        parts = [_fmt_atom(a) for a in self.body] + ["~" + _fmt_atom(a) for a in self.negated]
        if not parts:
            return f"{_fmt_atom(self.head)}."
        return f"{_fmt_atom(self.head)} :- {', '.join(parts)}."


@dataclass(eq=True)
class DatalogProgram:
    facts: tuple[FreeAtom, ...]
    rules: tuple[Rule, ...]
    query: str = GOAL
    comments: dict[str, str] = field(default_factory=dict, compare=False)

    def predicates(self) -> set[str]:
        out = {f.pred for f in self.facts}
        for r in self.rules:
            out.add(r.head.pred)
            out |= {a.pred for a in r.body + r.negated}
        return out

    def size(self) -> dict[str, int]:
        return {"facts": len(self.facts), "rules": len(self.rules)}


def _fmt_term(t) -> str:
    return str(t)


def _fmt_atom(a: FreeAtom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({', '.join(map(_fmt_term, a.args))})"


def export_datalog(program: DatalogProgram) -> str:
    lines = ["% hammered Datalog program"]
    for pred in sorted(program.comments):
        lines.append(f"% {pred}: {program.comments[pred]}")
    for f in program.facts:
        lines.append(f"{_fmt_atom(f)}.")
    for r in program.rules:
        lines.append(str(r))
    lines.append(f"@query {program.query} .")
    return "\n".join(lines) + "\n"


_DL_TOKEN = re.compile(r"\s+|%[^\n]*|(?P<tok>:-|@query|[A-Za-z0-9_]+|[(),.~-])")


def _dl_tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _DL_TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.group("tok"):
            out.append(m.group("tok"))
        pos = m.end()
    return out


def parse_datalog(text: str) -> DatalogProgram:
    """Inverse of :func:`export_datalog` (comments are not recovered)."""
    toks = _dl_tokens(text)
    i = 0

    def atom():
        nonlocal i
        name = toks[i]
        i += 1
        args = []
        if i < len(toks) and toks[i] == "(":
            i += 1
            while toks[i] != ")":
                t = toks[i]
                if t == "-":
                    i += 1
                    t = "-" + toks[i]
                args.append(Var(t) if t[0].isupper() else Point(t))
                i += 1
                if toks[i] == ",":
                    i += 1
            i += 1
        return FreeAtom(name, tuple(args))

    facts, rules, query = [], [], GOAL
    while i < len(toks):
        if toks[i] == "@query":
            query = toks[i + 1]
            if toks[i + 2] != ".":
                raise ParseError("malformed query")
            i += 3
            continue
        head = atom()
        if toks[i] == ".":
            i += 1
            facts.append(head)
            continue
        if toks[i] != ":-":
            raise ParseError(f"expected ':-' after {head}")
        i += 1
        body, neg = [], []
        while True:
            if toks[i] == "~":
                i += 1
                neg.append(atom())
            else:
                body.append(atom())
            if toks[i] == ",":
                i += 1
                continue
            if toks[i] == ".":
                i += 1
                break
            raise ParseError(f"unexpected token {toks[i]!r} in rule body")
        rules.append(Rule(head, tuple(body), tuple(neg)))
    return DatalogProgram(tuple(facts), tuple(rules), query)
