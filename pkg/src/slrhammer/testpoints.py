"""Interval partitions of the rationals and their test points.

Every variable bound occurring in the (instantiated) clause set contributes
a pair of borders; sorting all borders and pairing neighbours yields a
partition of the rationals into intervals on which no bound changes its
truth value.  Each interval gets one test point if it is a single value
and ``m`` test points otherwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import MalformedBorders, UnsupportedAtom
from .logic import (
    BoolAtom,
    Clause,
    Num,
    Point,
    TheoryAtom,
    Var,
    bound_parts,
    fmt_number,
    simplify_theory_atom,
)
from .preprocess import PositivelyGrounded, find_positively_grounded

# Border kinds in tie-break order for equal values: c) < [c < c] < (c.
UPPER_OPEN, LOWER_CLOSED, UPPER_CLOSED, LOWER_OPEN = range(4)


class _Infinity:
    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self):
        return "-inf" if self.sign < 0 else "inf"


NEG_INF = _Infinity(-1)
POS_INF = _Infinity(1)


@dataclass(frozen=True)
class Border:
    value: object  # Fraction, NEG_INF or POS_INF
    kind: int

    @property
    def is_lower(self) -> bool:
        return self.kind in (LOWER_CLOSED, LOWER_OPEN)

    @property
    def closed(self) -> bool:
        return self.kind in (LOWER_CLOSED, UPPER_CLOSED)

    @property
    def finite(self) -> bool:
        return isinstance(self.value, Fraction)

    def sort_key(self):
        if self.value is NEG_INF:
            return (0, Fraction(0), self.kind)
        if self.value is POS_INF:
            return (2, Fraction(0), self.kind)
        return (1, self.value, self.kind)

    def __lt__(self, other: "Border") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        v = "-inf" if self.value is NEG_INF else "inf" if self.value is POS_INF else fmt_number(self.value)
        return {UPPER_OPEN: f"{v})", LOWER_CLOSED: f"[{v}", UPPER_CLOSED: f"{v}]", LOWER_OPEN: f"({v}"}[self.kind]


LOWER_SENTINEL = Border(NEG_INF, LOWER_OPEN)
UPPER_SENTINEL = Border(POS_INF, UPPER_OPEN)


def bound_borders(op: str, value: Fraction) -> set[Border]:
    """Borders contributed by a bound ``x op value``."""
    out = set()
    if op in ("<=", "=", "!=", ">"):
        out |= {Border(value, UPPER_CLOSED), Border(value, LOWER_OPEN)}
    if op in (">=", "=", "!=", "<"):
        out |= {Border(value, UPPER_OPEN), Border(value, LOWER_CLOSED)}
    return out


@dataclass(frozen=True)
class Interval:
    lower: Border
    upper: Border

    @property
    def is_point(self) -> bool:
        return self.lower.finite and self.upper.finite and self.lower.value == self.upper.value

    def contains(self, x: Fraction) -> bool:
        lo, hi = self.lower, self.upper
        if lo.finite and (x < lo.value or (x == lo.value and not lo.closed)):
            return False
        if hi.finite and (x > hi.value or (x == hi.value and not hi.closed)):
            return False
        return True

    def __str__(self) -> str:
        lo = "(-inf" if not self.lower.finite else str(self.lower)
        hi = "inf)" if not self.upper.finite else str(self.upper)
        return f"{lo},{hi}"


def _instantiations(clause: Clause, grounded: PositivelyGrounded):
    """Candidate values for every variable bound by a negative grounded literal."""
    cands: dict[Var, set[Fraction]] = {}
    for lit in clause.negative:
        if lit.pred not in grounded:
            continue
        rows = grounded.facts.get(lit.pred, [])
        for pos, arg in enumerate(lit.atom.args):
            if isinstance(arg, Var):
                col = {row[pos] for row in rows}
                cands[arg] = cands[arg] & col if arg in cands else col
    return cands


def compute_endpoints(clauses: Iterable[Clause], extra_atoms: Iterable = (),
                      grounded: PositivelyGrounded | None = None) -> set[Border]:
    """Borders of all bounds in the clause set after grounded instantiation.

    Theory atoms whose variables are bound by negative literals of
    positively grounded predicates are instantiated with every matching fact
    value; each resulting atom must be a bound.  ``extra_atoms`` (conjecture
    atoms) are taken as they are.
    """
    clauses = list(clauses)
    if grounded is None:
        grounded = find_positively_grounded(clauses)
    borders = {LOWER_SENTINEL, UPPER_SENTINEL}

    def add(atom):
        s = simplify_theory_atom(atom)
        if isinstance(s, BoolAtom):
            return
        b = bound_parts(s)
        if b is None:
            raise UnsupportedAtom(f"theory atom {atom} is not a variable bound after instantiation")
        borders.update(bound_borders(b[1], b[2]))

    for clause in clauses:
        cands = _instantiations(clause, grounded)
        for atom in clause.constraint:
            if isinstance(atom, BoolAtom):
                continue
            bound_vars = [v for v in atom.vars() if v in cands]
            if not bound_vars:
                add(atom)
                continue
            seen = set()
            for values in itertools.product(*(sorted(cands[v]) for v in bound_vars)):
                inst = simplify_theory_atom(atom, {v: Num(c) for v, c in zip(bound_vars, values)})
                if inst in seen:
                    continue
                seen.add(inst)
                add(inst)
    for atom in extra_atoms:
        if not isinstance(atom, BoolAtom):
            add(atom)
    return borders


def build_partition(borders: Iterable[Border]) -> tuple[Interval, ...]:
    """Sort borders and pair them into consecutive intervals."""
    seq = sorted(set(borders))
    if not seq or seq[0] != LOWER_SENTINEL or seq[-1] != UPPER_SENTINEL:
        raise MalformedBorders("border set must contain both infinite sentinels")
    if len(seq) % 2:
        raise MalformedBorders("odd number of borders")
    out = []
    for lo, hi in zip(seq[0::2], seq[1::2]):
        if not lo.is_lower or hi.is_lower:
            raise MalformedBorders(f"borders {lo} and {hi} do not form an interval")
        if lo.finite and hi.finite and (lo.value > hi.value or (lo.value == hi.value and not (lo.closed and hi.closed))):
            raise MalformedBorders(f"empty interval {lo},{hi}")
        out.append(Interval(lo, hi))
    return tuple(out)


def default_beta(interval: Interval, m: int) -> list[Fraction]:
    """Representative values: the point itself, or ``m`` distinct interior values."""
    lo, hi = interval.lower, interval.upper
    if interval.is_point:
        return [lo.value]
    if lo.finite and hi.finite:
        width = hi.value - lo.value
        return [lo.value + width * Fraction(j, m + 1) for j in range(1, m + 1)]
    if hi.finite:
        return [hi.value - j for j in range(1, m + 1)]
    if lo.finite:
        return [lo.value + j for j in range(1, m + 1)]
    return [Fraction(j) for j in range(m)]


@dataclass
class TestPointSet:
    partition: tuple[Interval, ...]
    m: int
    points: dict[Interval, tuple[Point, ...]]
    beta: dict[Point, Fraction]
    interval_of: dict[Point, Interval]

    __test__ = False  # not a pytest class

    def all_points(self) -> list[Point]:
        return [p for iv in self.partition for p in self.points[iv]]

    def __len__(self) -> int:
        return len(self.beta)

    def index(self, p: Point) -> tuple[int, int]:
        k, j = p.name[1:].split("_")
        return int(k), int(j)

    def label(self, p: Point) -> str:
        return f"a_{{{self.interval_of[p]},{self.index(p)[1]}}}"

    def values(self) -> dict[Point, Fraction]:
        return dict(self.beta)

    def point_for(self, interval: Interval, j: int = 1) -> Point:
        return self.points[interval][j - 1]

    def find(self, text: str) -> Interval:
        for iv in self.partition:
            if str(iv) == text:
                return iv
        raise KeyError(text)


def make_test_points(partition: Iterable[Interval], m: int,
                     beta: Mapping[Interval, Iterable[Fraction]] | None = None) -> TestPointSet:
    """Test points ``a<k>_<j>`` for interval ``k`` (0-based) and index ``j`` (1-based)."""
    partition = tuple(partition)
    if m < 1:
        raise ValueError("m must be at least 1")
    points, values, owner = {}, {}, {}
    for k, iv in enumerate(partition):
        vals = list(beta[iv]) if beta and iv in beta else default_beta(iv, m)
        want = 1 if iv.is_point else m
        if len(vals) != want or len(set(vals)) != want or not all(iv.contains(Fraction(v)) for v in vals):
            raise ValueError(f"invalid representatives {vals} for interval {iv}")
        pts = tuple(Point(f"a{k}_{j}") for j in range(1, want + 1))
        points[iv] = pts
        for p, v in zip(pts, vals):
            values[p] = Fraction(v)
            owner[p] = iv
    return TestPointSet(partition, m, points, values, owner)


def idef(tps: TestPointSet) -> list[TheoryAtom]:
    """Interval membership constraints for every test point."""
    out = []
    for iv in tps.partition:
        for p in tps.points[iv]:
            lo, hi = iv.lower, iv.upper
            if lo.finite:
                out.append(TheoryAtom(Num(lo.value), "<=" if lo.closed else "<", p))
            if hi.finite:
                out.append(TheoryAtom(p, "<=" if hi.closed else "<", Num(hi.value)))
    return out


def derive_test_points(clauses, extra_atoms=(), m: int = 1, grounded=None) -> TestPointSet:
    return make_test_points(build_partition(compute_endpoints(clauses, extra_atoms, grounded)), m)
