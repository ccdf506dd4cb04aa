"""End-to-end decision procedure.

Horn problems with positive conjectures go through the Datalog route;
everything else is grounded over the test points and handed to the
propositional oracle, which only scales to small instances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .engine import CounterModel, Model, extract_counter_model, query_goal, saturate
from .errors import NonPositiveConjecture, NotHorn
from .formula import Problem, free_atoms, theory_atoms
from .hammer import GroundAbstraction, HammerResult, datalog_hammer, grounding_hammer
from .logic import Clause
from .oracle import OracleResult, oracle_decide
from .preprocess import (
    FlattenResult,
    elim_rounds,
    find_positively_grounded,
    flatten_conjecture,
    reduce_existential,
    split_guard,
)
from .testpoints import TestPointSet, build_partition, compute_endpoints, make_test_points

ENTAILED = "ENTAILED"
NOT_ENTAILED = "NOT ENTAILED"
SATISFIABLE = "SATISFIABLE"
UNSATISFIABLE = "UNSATISFIABLE"


@dataclass
class Verdict:
    status: str
    model: CounterModel | None = None
    stats: dict = field(default_factory=dict)
    route: str = "datalog"
    test_points: TestPointSet | None = None
    hammer: HammerResult | None = None
    abstraction: GroundAbstraction | None = None
    working_clauses: list[Clause] = field(default_factory=list)
    least_model: Model | None = None

    @property
    def exit_code(self) -> int:
        return 0 if self.status in (ENTAILED, UNSATISFIABLE) else 1

    @property
    def entailed(self) -> bool:
        return self.exit_code == 0


def _status(problem: Problem, refuted: bool) -> str:
    """``refuted``: the negated conjecture (or the clause set) is unsatisfiable."""
    if problem.mode == "sat":
        return UNSATISFIABLE if refuted else SATISFIABLE
    return ENTAILED if refuted else NOT_ENTAILED


@dataclass
class Prepared:
    clauses: list[Clause]
    goal: FlattenResult | None
    m: int
    extra_atoms: list


def prepare_datalog(problem: Problem, prune: bool = True) -> Prepared:
    """Working clause set, goal and multiplicity for the Datalog route."""
    clauses = list(problem.clauses)
    conj = problem.conjecture
    if conj is None:
        return Prepared(clauses, None, 1, [])
    if not conj.positive:
        raise NonPositiveConjecture("the Datalog route needs a positive conjecture")
    if conj.kind == "exists":
        return Prepared(reduce_existential(conj, clauses), None, 1, [])
    goal = split_guard(conj) if prune else None
    if goal is None:
        goal = flatten_conjecture(conj)
    return Prepared(clauses + goal.definitions, goal, max(1, len(conj.variables)), list(goal.guard))


def _test_points(clauses, extra, m, beta, stats) -> TestPointSet:
    borders = compute_endpoints(clauses, extra, find_positively_grounded(clauses))
    partition = build_partition(borders)
    tps = make_test_points(partition, m, beta)
    stats.update({"|C|": len(borders), "|I|": len(partition), "|B|": len(tps), "m": m})
    return tps


def hammer_problem(problem: Problem, prune: bool = True, symmetry: bool = False,
                   stratified: bool = False, beta: Mapping | None = None, stats: dict | None = None):
    """Run preprocessing, test point construction and the Datalog hammer.

    Returns ``(prepared, test_points, hammer_result)``; timings go into ``stats``.
    """
    if not problem.is_horn():
        raise NotHorn("the Datalog route needs Horn clauses")
    stats = {} if stats is None else stats
    t0 = time.perf_counter()
    prep = prepare_datalog(problem, prune)
    tps = _test_points(prep.clauses, prep.extra_atoms, prep.m, beta, stats)
    t1 = time.perf_counter()
    hres = datalog_hammer(prep.clauses, prep.goal, tps, stratified=stratified, symmetry=symmetry)
    stats.update({"t-time": t1 - t0, "h-time": time.perf_counter() - t1})
    return prep, tps, hres


def ground_problem_abstraction(problem: Problem, beta: Mapping | None = None, elim_passes: int = 0,
                               stats: dict | None = None, live_only: bool = False):
    """Working clauses, test points and ground abstraction for the grounding route."""
    stats = {} if stats is None else stats
    conj = problem.conjecture
    t0 = time.perf_counter()
    clauses = list(problem.clauses)
    if elim_passes:
        exclude = {a.pred for a in free_atoms(conj.body)} if conj else set()
        clauses = elim_rounds(clauses, elim_passes, exclude)
    m = max(1, len(conj.variables)) if conj and conj.kind == "forall" else 1
    extra = theory_atoms(conj.body) if conj else []
    tps = _test_points(clauses, extra, m, beta, stats)
    t1 = time.perf_counter()
    psi = grounding_hammer(clauses, conj, tps, live_only=live_only)
    stats.update({"ground clauses": len(psi.ground_clauses), "t-time": t1 - t0,
                  "h-time": time.perf_counter() - t1})
    return clauses, tps, psi


def decide(problem: Problem, route: str = "auto", prune: bool = True, symmetry: bool = False,
           stratified: bool = False, beta: Mapping | None = None, trace: Callable | None = None,
           elim_passes: int = 0) -> Verdict:
    """Decide the problem's conjecture (or satisfiability if it has none).

    ``route`` is ``"datalog"``, ``"ground"`` or ``"auto"``.
    """
    if route == "auto":
        positive = problem.conjecture is None or problem.conjecture.positive
        route = "datalog" if problem.is_horn() and positive else "ground"
    if route == "ground":
        return decide_ground(problem, beta=beta, elim_passes=elim_passes)
    stats: dict = {}
    prep, tps, hres = hammer_problem(problem, prune, symmetry, stratified, beta, stats)
    t2 = time.perf_counter()
    model = saturate(hres.program, trace=trace)
    t3 = time.perf_counter()
    derived = query_goal(model)
    stats.update({
        "rules": len(hres.program.rules),
        "facts": len(hres.program.facts),
        "tfacts": len(hres.tfacts),
        "goal atoms": len(hres.goal_atoms),
        "derived": len(model),
        "symmetry": hres.symmetry_used,
        "r-time": t3 - t2,
    })
    cm = None
    if not derived:
        fresh = {l.pred for c in prep.clauses for l in c.positive if l.pred.startswith("_flat")}
        preds = sorted(set(problem.arities) | fresh)
        cm = extract_counter_model(model, tps, preds)
    return Verdict(_status(problem, derived), cm, stats, "datalog", tps, hres, None, prep.clauses, model)


def decide_ground(problem: Problem, beta: Mapping | None = None, elim_passes: int = 0,
                  limit: int | None = None) -> Verdict:
    """Ground over the test points and decide with the propositional oracle."""
    stats: dict = {}
    clauses, tps, psi = ground_problem_abstraction(problem, beta, elim_passes, stats, live_only=True)
    t2 = time.perf_counter()
    res: OracleResult = oracle_decide(psi, limit)
    stats.update({"oracle": res.method, "r-time": time.perf_counter() - t2})
    cm = None
    if res.satisfiable:
        ext: dict = {p: set() for p in problem.arities}
        for a in res.model:
            ext.setdefault(a.pred, set()).add(a.args)
        cm = CounterModel(ext, tps)
    return Verdict(_status(problem, not res.satisfiable), cm, stats, "ground", tps, None, psi, clauses)
