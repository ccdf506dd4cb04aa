"""Seeded random problems for the property suite.

Instances are written as text and parsed back, so every generated problem
has passed the same checks as user input.  Variable comparisons and sums
only appear when one side is bound by a fact-table predicate, which keeps
the instances inside the positively grounded fragment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formula import Problem
from .parser import parse_problem

MODES = ("forall", "exists", "sat", "none")
_OPS = ("<=", "<", "=", ">", ">=")
_TABLE = "T"


@dataclass(frozen=True)
class InstanceSpec:
    seed: int
    max_predicates: int = 4
    max_arity: int = 2
    max_clauses: int = 6
    max_vars: int = 2
    const_range: tuple[int, int] = (-3, 3)
    horn: bool = True
    mode: str = "any"  # one of MODES or "any"
    table_rows: int = 3
    table_probability: float = 0.5


class _Gen:
    def __init__(self, spec: InstanceSpec):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.vars = ["x", "y", "z", "w"][: max(1, spec.max_vars)]

    def const(self) -> int:
        lo, hi = self.spec.const_range
        return self.rng.randint(lo, hi)

    def bound(self, v: str) -> str:
        return f"{v} {self.rng.choice(_OPS)} {self.const()}"

    def atom(self, pred: str, arity: int, pool: list[str]) -> str:
        return f"{pred}({', '.join(self.rng.choice(pool) for _ in range(arity))})"

    def signature(self, budget: int) -> dict[str, int]:
        n = self.rng.randint(1, max(1, budget))
        preds = {}
        for k in range(n):
            preds["PQRS"[k] if k < 4 else f"P{k}"] = self.rng.randint(1, max(1, self.spec.max_arity))
        return preds

    def clause(self, preds: dict[str, int], table: int | None) -> str:
        rng = self.rng
        nv = rng.randint(1, len(self.vars))
        pool = self.vars[:nv]
        body: list[str] = []
        bound_by_table: set[str] = set()
        if table is not None and rng.random() < 0.5:
            args = [rng.choice(pool) for _ in range(table)]
            body.append(f"{_TABLE}({', '.join(args)})")
            bound_by_table |= set(args)
        names = list(preds)
        for _ in range(rng.randint(0, 2)):
            p = rng.choice(names)
            body.append(self.atom(p, preds[p], pool))
        constraint = [self.bound(rng.choice(pool)) for _ in range(rng.randint(0, 2))]
        if bound_by_table and len(pool) > 1 and rng.random() < 0.8:
            s = rng.choice(sorted(bound_by_table))
            other = rng.choice([v for v in pool if v != s])
            if rng.random() < 0.5:
                constraint.append(f"{other} {rng.choice(_OPS)} {s}")
            else:
                sign = rng.choice(("+", "-"))
                constraint.append(f"{other} {sign} {s} {rng.choice(_OPS)} {self.const()}")
        heads: list[str] = []
        n_heads = rng.choices((0, 1, 2), (2, 7, 0 if self.spec.horn else 2))[0]
        for _ in range(n_heads):
            p = rng.choice(names)
            heads.append(self.atom(p, preds[p], pool))
        lits = [f"!{b}" for b in body] + heads
        if not lits:
            lits = [self.atom(names[0], preds[names[0]], pool)]
        head = f"{', '.join(constraint)} || " if constraint else "|| "
        return f"clause {head}{', '.join(lits)}."

    def fact(self, pred: str, arity: int) -> str:
        return f"fact {pred}({', '.join(str(self.const()) for _ in range(arity))})."

    def formula(self, preds: dict[str, int], pool: list[str], depth: int, used: set[str]) -> str:
        rng = self.rng
        if depth == 0 or rng.random() < 0.4:
            if rng.random() < 0.6:
                p = rng.choice(list(preds))
                args = [rng.choice(pool) for _ in range(preds[p])]
                used |= set(args)
                return f"{p}({', '.join(args)})"
            v = rng.choice(pool)
            used.add(v)
            return self.bound(v)
        op = rng.choice((" /\\ ", " \\/ "))
        return "(" + op.join(self.formula(preds, pool, depth - 1, used) for _ in range(2)) + ")"

    def conjecture(self, mode: str, preds: dict[str, int]) -> str | None:
        rng = self.rng
        if mode == "none":
            return None
        if mode == "sat":
            return "conjecture forall. false."
        nv = rng.randint(1, min(2, len(self.vars)))
        pool = self.vars[:nv]
        if mode == "forall" and rng.random() < 0.4:
            # guarded goal shape: bounds || P(xs)
            p = rng.choice([q for q in preds if preds[q] >= 1])
            args = pool + [rng.choice(pool) for _ in range(preds[p] - nv)] if preds[p] >= nv else None
            if args is not None:
                rng.shuffle(args)
                guard = [self.bound(v) for v in pool for _ in range(rng.randint(0, 1))]
                return f"conjecture forall {', '.join(pool)}. ({', '.join(guard)} || {p}({', '.join(args)}))."
        used: set[str] = set()
        body = self.formula(preds, pool, 2, used)
        for v in pool:
            if v not in used:
                joiner = rng.choice((" /\\ ", " \\/ "))
                p = rng.choice(list(preds))
                body = f"({body}{joiner}{p}({', '.join([v] * preds[p])}))"
        return f"conjecture {mode} {', '.join(pool)}. {body}."

    def problem_text(self) -> str:
        spec, rng = self.spec, self.rng
        table = None
        if spec.max_predicates > 1 and rng.random() < spec.table_probability:
            table = rng.randint(1, max(1, spec.max_arity))
        preds = self.signature(spec.max_predicates - (table is not None))
        lines = []
        n_clauses = rng.randint(0, spec.max_clauses) if spec.max_clauses > 0 else 0
        if table is not None and n_clauses:
            for _ in range(rng.randint(1, spec.table_rows)):
                if len(lines) >= n_clauses:
                    break
                lines.append(self.fact(_TABLE, table))
        while len(lines) < n_clauses:
            if rng.random() < 0.25:
                p = rng.choice(list(preds))
                lines.append(self.fact(p, preds[p]))
            else:
                lines.append(self.clause(preds, table))
        mode = spec.mode
        if mode == "any":
            mode = rng.choices(MODES, (4, 3, 1, 1))[0]
            if mode == "none" and not lines:
                mode = "sat"
        conj = self.conjecture(mode, preds)
        if conj:
            lines.append(conj)
        return "\n".join(lines) + "\n"


def generate_text(spec: InstanceSpec) -> str:
    return _Gen(spec).problem_text()


def generate_instance(spec: InstanceSpec) -> Problem:
    """A random problem, deterministic in ``spec``."""
    return parse_problem(generate_text(spec))


def ecu_scaling_text(rows: int = 150, width: int = 20) -> str:
    """A one-dimensional ignition table over engine speed with ``rows`` bands.

    Each band ``[k*width, (k+1)*width)`` maps to an ignition value drawn
    from ten band boundaries, so every boundary becomes a point interval
    and the table values add no further test points.
    The conjecture asks that every speed in range gets an ignition value.
    """
    top = rows * width
    lines = [
        f"% Synthetic ignition table: {rows} speed bands of width {width} covering [0, {top}).",
        f"clause 0 <= r, r < {top} || Rpm(r).",
        "clause r >= r1, r < r2 || !Rpm(r), !IgnTable(r1, r2, z), IgnDeg(r, z).",
        "clause IgnDeg(r, z) -> Covered(r).",
    ]
    for k in range(rows):
        lines.append(f"fact IgnTable({k * width}, {(k + 1) * width}, {(k % 10 + 1) * width}).")
    lines.append(f"conjecture forall r. (0 <= r, r < {top} || Covered(r)).")
    return "\n".join(lines) + "\n"
