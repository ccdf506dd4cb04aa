"""Bottom-up evaluation of stratified Datalog.

Constants are interned to integers.  Each stratum is saturated semi-naively:
after a full first round, a rule is re-evaluated only with one body atom
restricted to the facts derived in the previous round.  ``naive_saturate``
recomputes every rule against everything until nothing changes and exists to
cross-check the semi-naive evaluator.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import networkx as nx

from .datalog import GOAL, DatalogProgram, Rule
from .errors import GoalPresent, NotStratified, ResourceLimit
from .logic import FreeAtom, Point, Var
from .testpoints import TestPointSet

log = logging.getLogger(__name__)

FACT_CAP = 8 * 10**7


def stratify(program: DatalogProgram) -> list[list[Rule]]:
    """Rules grouped by stratum, lowest first.

    A predicate's stratum is the largest number of negative edges on a
    dependency path into it; a negative edge inside a cycle is an error.
    """
    g = nx.DiGraph()
    g.add_nodes_from(program.predicates())
    for r in program.rules:
        for a in r.body:
            if not g.has_edge(a.pred, r.head.pred):
                g.add_edge(a.pred, r.head.pred, neg=False)
        for a in r.negated:
            g.add_edge(a.pred, r.head.pred, neg=True)
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    for u, v, data in g.edges(data=True):
        if data["neg"] and members[u] == members[v]:
            raise NotStratified(f"{v} depends negatively on {u} within a cycle")
    level: dict[int, int] = {}
    for comp in nx.topological_sort(cond):
        best = 0
        for node in cond.nodes[comp]["members"]:
            for u, _, data in g.in_edges(node, data=True):
                cu = members[u]
                if cu == comp:
                    continue
                best = max(best, level[cu] + (1 if data["neg"] else 0))
        level[comp] = best
    strata: dict[int, list[Rule]] = defaultdict(list)
    for r in program.rules:
        strata[level[members[r.head.pred]]].append(r)
    return [strata[k] for k in sorted(strata)]


class Model:
    """Derived relations, decoded back to test-point constants."""

    def __init__(self, relations: dict[str, set[tuple]], constants: list):
        self._rel = relations
        self._const = constants

    def relation(self, pred: str) -> set[tuple]:
        return {tuple(self._const[i] for i in t) for t in self._rel.get(pred, ())}

    def predicates(self) -> list[str]:
        return sorted(p for p, ts in self._rel.items() if ts)

    def holds(self, atom: FreeAtom) -> bool:
        return atom in self.facts()

    def facts(self) -> set[FreeAtom]:
        if not hasattr(self, "_facts"):
            self._facts = {FreeAtom(p, tuple(self._const[i] for i in t)) for p, ts in self._rel.items() for t in ts}
        return self._facts

    def __len__(self) -> int:
        return sum(len(ts) for ts in self._rel.values())


class _Store:
    def __init__(self, cap: int):
        self.rel: dict[str, set[tuple]] = defaultdict(set)
        self.index: dict[tuple[str, tuple[int, ...]], dict[tuple, list[tuple]]] = {}
        self.by_pred: dict[str, list[tuple[int, ...]]] = defaultdict(list)
        self.count = 0
        self.cap = cap

    def add(self, pred: str, t: tuple) -> bool:
        rel = self.rel[pred]
        if t in rel:
            return False
        rel.add(t)
        self.count += 1
        if self.count > self.cap:
            raise ResourceLimit(f"more than {self.cap} facts derived")
        for cols in self.by_pred.get(pred, ()):
            self.index[(pred, cols)].setdefault(tuple(t[c] for c in cols), []).append(t)
        return True

    def lookup(self, pred: str, cols: tuple[int, ...], key: tuple):
        if not cols:
            return self.rel.get(pred, ())
        idx = self.index.get((pred, cols))
        if idx is None:
            idx = {}
            for t in self.rel.get(pred, ()):
                idx.setdefault(tuple(t[c] for c in cols), []).append(t)
            self.index[(pred, cols)] = idx
            self.by_pred[pred].append(cols)
        return idx.get(key, ())


class _CompiledRule:
    """Rule with variables numbered and constants interned."""

    def __init__(self, rule: Rule, intern):
        slots: dict[Var, int] = {}

        def pattern(atom):
            out = []
            for a in atom.args:
                if isinstance(a, Var):
                    out.append((True, slots.setdefault(a, len(slots))))
                else:
                    out.append((False, intern(a)))
            return (atom.pred, tuple(out))

        self.rule = rule
        self.body = [pattern(a) for a in rule.body]
        self.negated = [pattern(a) for a in rule.negated]
        self.head = pattern(rule.head)
        self.nvars = len(slots)
        self.ground = [i for i, (_, pat) in enumerate(self.body) if all(not v for v, _ in pat)]
        self.ground_set = set(self.ground)
        self.open = [i for i in range(len(self.body)) if i not in self.ground_set]


def _inst(pat, binding):
    return tuple(binding[x] if is_var else x for is_var, x in pat)


def _match(pat, t, binding) -> bool:
    """Extend ``binding`` in place; on failure the binding may hold junk in fresh slots."""
    for (is_var, x), v in zip(pat, t):
        if is_var:
            cur = binding[x]
            if cur is None:
                binding[x] = v
            elif cur != v:
                return False
        elif x != v:
            return False
    return True


class _Evaluator:
    def __init__(self, program: DatalogProgram, cap: int, trace: Callable | None):
        self.consts: list = []
        self.ids: dict = {}
        self.store = _Store(cap)
        self.trace = trace
        self.program = program

    def intern(self, c) -> int:
        i = self.ids.get(c)
        if i is None:
            i = self.ids[c] = len(self.consts)
            self.consts.append(c)
        return i

    def order(self, cr: _CompiledRule, first: int | None) -> list[int]:
        bound: set[int] = set()
        todo = list(cr.open)
        seq = []
        if first is not None and first in todo:
            todo.remove(first)
            seq.append(first)
            bound |= {x for v, x in cr.body[first][1] if v}
        while todo:
            def score(i):
                pred, pat = cr.body[i]
                nb = sum(1 for v, x in pat if v and x in bound)
                return (-nb, len(self.store.rel.get(pred, ())))
            nxt = min(todo, key=score)
            todo.remove(nxt)
            seq.append(nxt)
            bound |= {x for v, x in cr.body[nxt][1] if v}
        return seq

    def fire(self, cr: _CompiledRule, delta: dict[str, set] | None, pos: int | None, out: set):
        rel = self.store.rel
        if delta is not None and pos in cr.ground_set:
            pred, pat = cr.body[pos]
            if _inst(pat, ()) not in delta.get(pred, ()):
                return
        for i in cr.ground:
            pred, pat = cr.body[i]
            t = _inst(pat, ())
            src = delta.get(pred, ()) if (delta is not None and i == pos) else rel.get(pred, ())
            if t not in src:
                return
        seq = self.order(cr, pos if pos in cr.open else None)
        binding: list = [None] * cr.nvars
        hpred, hpat = cr.head

        def emit():
            for npred, npat in cr.negated:
                if _inst(npat, binding) in rel.get(npred, ()):
                    return
            t = _inst(hpat, binding)
            if t not in rel.get(hpred, ()):
                out.add((hpred, t))

        def step(k: int):
            if k == len(seq):
                emit()
                return
            i = seq[k]
            pred, pat = cr.body[i]
            if delta is not None and i == pos:
                candidates = delta.get(pred, ())
            else:
                cols = tuple(c for c, (v, x) in enumerate(pat) if (v and binding[x] is not None) or not v)
                key = tuple(binding[x] if v else x for v, x in (pat[c] for c in cols))
                candidates = self.store.lookup(pred, cols, key)
            fresh = [x for v, x in pat if v and binding[x] is None]
            for t in candidates:
                if _match(pat, t, binding):
                    step(k + 1)
                for x in fresh:
                    binding[x] = None

        step(0)

    def run(self) -> Model:
        for f in self.program.facts:
            self.store.add(f.pred, tuple(self.intern(a) for a in f.args))
        strata = stratify(self.program)
        for level, rules in enumerate(strata):
            compiled = [_CompiledRule(r, self.intern) for r in rules]
            new: set = set()
            for cr in compiled:
                self.fire(cr, None, None, new)
            rnd = 0
            while new:
                delta: dict[str, set] = defaultdict(set)
                for pred, t in new:
                    if self.store.add(pred, t):
                        delta[pred].add(t)
                if self.trace:
                    self.trace(level, rnd, sum(len(v) for v in delta.values()))
                rnd += 1
                new = set()
                for cr in compiled:
                    for pos, (pred, _) in enumerate(cr.body):
                        if delta.get(pred):
                            self.fire(cr, delta, pos, new)
        return Model(dict(self.store.rel), self.consts)


def _log_trace(level, rnd, n):
    log.debug("stratum %d iteration %d: %d new facts", level, rnd, n)


def saturate(program: DatalogProgram, cap: int = FACT_CAP, trace: Callable | None = None) -> Model:
    """Least model of a stratified program, computed semi-naively.

    ``trace(stratum, iteration, new_fact_count)`` is called after every round.
    """
    return _Evaluator(program, cap, trace if trace is not None else _log_trace).run()


def naive_saturate(program: DatalogProgram) -> Model:
    """Reference fixpoint: re-evaluate every rule on all facts until stable."""
    facts: dict[str, set[tuple]] = defaultdict(set)
    for f in program.facts:
        facts[f.pred].add(f.args)

    def matches(atoms, sub):
        if not atoms:
            yield sub
            return
        first, rest = atoms[0], atoms[1:]
        for t in list(facts.get(first.pred, ())):
            s = dict(sub)
            ok = True
            for a, v in zip(first.args, t):
                if isinstance(a, Var):
                    if s.setdefault(a, v) != v:
                        ok = False
                        break
                elif a != v:
                    ok = False
                    break
            if ok:
                yield from matches(rest, s)

    for rules in stratify(program):
        changed = True
        while changed:
            changed = False
            for r in rules:
                for sub in list(matches(r.body, {})):
                    if any(tuple(sub.get(a, a) for a in n.args) in facts.get(n.pred, ()) for n in r.negated):
                        continue
                    t = tuple(sub.get(a, a) for a in r.head.args)
                    if t not in facts[r.head.pred]:
                        facts[r.head.pred].add(t)
                        changed = True
    consts = sorted({c for ts in facts.values() for t in ts for c in t}, key=str)
    ids = {c: i for i, c in enumerate(consts)}
    return Model({p: {tuple(ids[c] for c in t) for t in ts} for p, ts in facts.items()}, consts)


def query_goal(model: Model, query: str = GOAL) -> bool:
    return bool(model._rel.get(query))


@dataclass
class CounterModel:
    """Predicate extensions over test points, plus their interval reading.

    A non-test value of an interval behaves like that interval's first test
    point; the other test points stand only for their own value.
    """

    extensions: dict[str, set[tuple[Point, ...]]]
    test_points: TestPointSet

    def describe_value(self, p: Point) -> str:
        tps = self.test_points
        iv = tps.interval_of[p]
        k, j = tps.index(p)
        if iv.is_point or j > 1:
            return _fmt(tps.beta[p])
        others = [_fmt(tps.beta[q]) for q in tps.points[iv][1:]]
        text = str(iv)
        return f"{text} \\ {{{', '.join(others)}}}" if others else text

    def lines(self) -> list[str]:
        out = []
        for pred in sorted(self.extensions):
            rows = sorted(self.extensions[pred], key=lambda t: [self.test_points.index(p) for p in t])
            if not rows:
                out.append(f"{pred} = {{}}")
                continue
            labels = ", ".join(
                "(" + ", ".join(self.test_points.label(p) for p in t) + ")" if len(t) != 1 else self.test_points.label(t[0])
                for t in rows)
            out.append(f"{pred} = {{{labels}}}")
            for t in rows:
                region = " x ".join(self.describe_value(p) for p in t) if t else "true"
                beta = ", ".join(_fmt(self.test_points.beta[p]) for p in t)
                out.append(f"  {pred} holds on {region}  (test point values {beta or '-'})")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def extract_counter_model(model: Model, tps: TestPointSet, predicates: Iterable[str] | None = None,
                          query: str = GOAL) -> CounterModel:
    """Extensions of the free predicates in a least model without the goal."""
    if query_goal(model, query):
        raise GoalPresent("the goal was derived; there is no counter-model")
    if predicates is None:
        predicates = [p for p in model.predicates() if not p.startswith(("t_", "_")) and p not in ("expected", "missing")]
    return CounterModel({p: model.relation(p) for p in predicates}, tps)
