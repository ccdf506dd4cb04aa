import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slrhammer.datalog import GOAL, DatalogProgram, Rule, export_datalog, parse_datalog
from slrhammer.engine import query_goal, saturate
from slrhammer.errors import SizeLimit, UnsupportedFormat
from slrhammer.export import export_ground, export_hammered
from slrhammer.generator import InstanceSpec, generate_instance
from slrhammer.hammer import (
    EXPECTED, encode_stratified_goal, goal_transform, ground_goal, grounding_hammer, tfacts, tren,
)
from slrhammer.logic import FreeAtom, Var
from slrhammer.parser import parse_clause
from slrhammer.pipeline import ground_problem_abstraction, hammer_problem
from slrhammer.preprocess import flatten_conjecture, satisfiability_as_conjecture, split_guard
from slrhammer.testpoints import (
    LOWER_SENTINEL, UPPER_SENTINEL, build_partition, compute_endpoints, make_test_points,
)

from conftest import running


def tps_for(clauses, m=1):
    return make_test_points(build_partition(compute_endpoints(clauses)), m)


def names(atoms):
    return sorted(str(a) for a in atoms)


# -- grounding hammer -----------------------------------------------------------

def test_ground_instances_running_example(phi4):
    tps = tps_for(phi4.clauses, 2)
    psi = grounding_hammer(phi4.clauses, phi4.conjecture, tps)
    assert len(psi.ground_clauses) == 3 * 8
    assert tps.label(tps.all_points()[0]) == "a_{(-inf,0),1}"
    assert "0 <= a0_1, a0_1 <= 2 || !P(a0_1) \\/ Q(a0_1)" in {str(c) for c in psi.ground_clauses}
    assert all(not c.vars() for c in psi.ground_clauses)
    # one disjunct per grounding of the single conjecture variable
    assert len(psi.negated_conjecture.children) == 8


def test_ground_empty_clause_set():
    tps = make_test_points(build_partition({LOWER_SENTINEL, UPPER_SENTINEL}), 1)
    psi = grounding_hammer([], satisfiability_as_conjecture(), tps)
    assert psi.ground_clauses == [] and psi.interval_bounds == []


def test_ground_two_variables():
    clauses = [parse_clause("x <= y, x <= 1, y > 3 || !P(x) \\/ P(y)")]
    tps = tps_for([parse_clause("0 <= x, x <= 1, x > 3 || P(x)")], 2)
    assert len(tps) == 8
    assert len(grounding_hammer(clauses, None, tps).ground_clauses) == 64


def test_ground_size_cap():
    clauses = [parse_clause("x <= 1 || !P(x, y) \\/ P(y, x)")]
    with pytest.raises(SizeLimit):
        grounding_hammer(clauses, None, tps_for(clauses, 2), cap=10)


def test_live_only_drops_false_instances(phi4):
    tps = tps_for(phi4.clauses, 1)
    full = grounding_hammer(phi4.clauses, phi4.conjecture, tps)
    live = grounding_hammer(phi4.clauses, phi4.conjecture, tps, live_only=True)
    assert set(live.ground_clauses) < set(full.ground_clauses)
    beta = tps.beta
    for c in set(full.ground_clauses) - set(live.ground_clauses):
        assert not all(a.evaluate(beta) for a in c.constraint)


# -- tren / tfacts ------------------------------------------------------------

def test_tren_bound():
    out, preds = tren([parse_clause("x <= 1 || P(x)")])
    (name,) = preds
    assert name.startswith("t_") and len(name) == 12
    assert str(out[0]) == f"!{name}(x) \\/ P(x)"
    assert str(preds[name].template()) == "V0 <= 1"


def test_tren_without_constraint():
    c = parse_clause("!P(x) \\/ Q(x)")
    out, preds = tren([c])
    assert out == [c] and preds == {}


def test_tren_shares_predicates_up_to_renaming():
    out, preds = tren([parse_clause("y <= 1 || Q(y)"), parse_clause("x <= 1 || P(x)"),
                       parse_clause("1 >= z || R(z)")])
    assert len(preds) == 1


def test_tren_names_are_stable():
    a = tren([parse_clause("x <= 1 || P(x)")])[1]
    b = tren([parse_clause("y <= 1 || R(y)")])[1]
    assert list(a) == list(b)


def test_tfacts_running_example(running_clauses):
    tps = tps_for(running_clauses)
    _, preds = tren(running_clauses)
    facts = set(tfacts(preds, tps))
    (lower,) = [n for n, p in preds.items() if str(p.template()) == "V0 >= 0"]
    a0, a1 = tps.all_points()[:2]
    assert tps.label(a1) == "a_{[0,1],1}"
    assert FreeAtom(lower, (a1,)) in facts
    assert FreeAtom(lower, (a0,)) not in facts


def test_tfacts_variable_comparison():
    clauses = [parse_clause("x < y, x <= 1, y >= 3 || !P(x) \\/ P(y)")]
    tps = tps_for([parse_clause("0 <= x, x <= 1, x > 3 || P(x)")], 2)
    _, preds = tren(clauses)
    (cmp_name,) = [n for n, p in preds.items() if p.arity == 2]
    facts = set(tfacts(preds, tps))
    pts = tps.all_points()
    template = preds[cmp_name]
    for a, b in itertools.product(pts, repeat=2):
        expected = template.holds([tps.beta[a], tps.beta[b]])
        assert (FreeAtom(cmp_name, (a, b)) in facts) == expected
    # 8 distinct values: a strict comparison holds on C(8, 2) ordered pairs
    assert len(pts) == 8
    assert sum(FreeAtom(cmp_name, t) in facts for t in itertools.product(pts, repeat=2)) == 28


def test_tfacts_single_interval():
    tps = make_test_points(build_partition({LOWER_SENTINEL, UPPER_SENTINEL}), 1)
    _, preds = tren([parse_clause("0 <= x || P(x)")])
    assert len(tfacts(preds, tps)) == 1


def test_tfacts_large_values_exact():
    # coefficients and values large enough to force the exact fallback
    clauses = [parse_clause("x <= 1000000000000, y >= 3 || !P(x) \\/ P(y)"),
               parse_clause("3 * x - 7 * y < 5 || P(x) \\/ !Q(y)")]
    tps = tps_for([clauses[0]], 2)
    _, preds = tren(clauses)
    facts = set(tfacts(preds, tps))
    for name, p in preds.items():
        for combo in itertools.product(tps.all_points(), repeat=p.arity):
            assert (FreeAtom(name, combo) in facts) == p.holds([tps.beta[a] for a in combo])


# -- goal -----------------------------------------------------------------------

def test_ground_goal_flattened_phi3(phi3, running_clauses):
    fr = flatten_conjecture(phi3.conjecture)
    tps = tps_for(running_clauses)
    atoms = ground_goal(fr.goal, tps)
    assert names(atoms) == ["_flat0(a0_1)", "_flat0(a1_1)", "_flat0(a2_1)", "_flat0(a3_1)"]


def test_ground_goal_guard_prunes(phi3, running_clauses):
    fr = split_guard(phi3.conjecture)
    tps = tps_for(running_clauses)
    atoms = ground_goal(fr.goal, tps, fr.guard)
    assert [tps.label(a.args[0]) for a in atoms] == ["a_{[0,1],1}"]


def test_ground_goal_nullary(running_clauses):
    assert ground_goal(FreeAtom("P"), tps_for(running_clauses)) == [FreeAtom("P")]


def test_ground_goal_symmetry_keeps_one_per_orbit(running_clauses):
    tps = tps_for(running_clauses, 2)
    goal = FreeAtom("R", (Var("x"), Var("y")))
    full = ground_goal(goal, tps)
    reduced = ground_goal(goal, tps, symmetry=True)
    assert len(full) == 64
    assert len(reduced) < len(full)


def test_goal_transform_headless_clause():
    facts, rules, needs_dom = goal_transform([parse_clause("!P(x) \\/ !Q(x)"), parse_clause("P(x)")])
    assert str(rules[0]) == "goal :- P(V0), Q(V0)."
    assert needs_dom and str(rules[1]) == "P(V0) :- _dom(V0)."


def test_goal_transform_without_headless_clause():
    facts, rules, _ = goal_transform([parse_clause("!P(x) \\/ Q(x)")])
    assert all(r.head.pred != GOAL for r in rules)


def test_existential_refutation_becomes_goal_rule():
    p = running("conjecture exists x. (Q(x) /\\ x > 1).\n")
    _, _, h = hammer_problem(p)
    assert any(r.head.pred == GOAL for r in h.program.rules)


def test_stratified_encoding_phi3(phi3):
    _, tps, h = hammer_problem(phi3, prune=False, stratified=True)
    expected = [f for f in h.program.facts if f.pred == EXPECTED]
    negated = [r for r in h.program.rules if r.negated]
    assert len(expected) == 4 and len(negated) == 2
    assert query_goal(saturate(h.program))


def test_stratified_encoding_phi4(phi4):
    _, _, h = hammer_problem(phi4, prune=False, stratified=True)
    model = saturate(h.program)
    assert not query_goal(model)
    assert model.relation("missing")


def test_stratified_empty_expected_is_vacuous():
    facts, rules = encode_stratified_goal([], "P")
    assert query_goal(saturate(DatalogProgram(tuple(facts), tuple(rules))))


# -- export -------------------------------------------------------------------

def test_datalog_round_trip(phi3):
    _, _, h = hammer_problem(phi3, prune=False)
    text = export_datalog(h.program)
    assert parse_datalog(text) == h.program
    assert export_datalog(parse_datalog(text)).splitlines()[-1] == "@query goal ."


def test_datalog_stratified_round_trip(phi4):
    _, _, h = hammer_problem(phi4, stratified=True)
    text = export_datalog(h.program)
    assert "~goal" not in text and "~" in text
    assert parse_datalog(text) == h.program


def test_empty_program_export():
    text = export_datalog(DatalogProgram((), ()))
    body = [ln for ln in text.splitlines() if not ln.startswith("%")]
    assert body == ["@query goal ."]


def test_export_is_byte_stable(phi4):
    a = export_hammered(hammer_problem(phi4)[2], "datalog")
    b = export_hammered(hammer_problem(phi4)[2], "datalog")
    assert a == b


def test_ground_export_has_idef(phi4):
    _, _, psi = ground_problem_abstraction(phi4)
    text = export_ground(psi, "clauses")
    assert "% a1_1 = a_{[0,1],1}, value 1/2" in text
    assert "0 <= a1_1." in text and "a1_1 <= 1." in text


def test_unknown_format(phi4):
    with pytest.raises(UnsupportedFormat):
        export_hammered(hammer_problem(phi4)[2], "tptp")
    with pytest.raises(UnsupportedFormat):
        export_ground(ground_problem_abstraction(phi4)[2], "dimacs")


def test_rule_canonical_names():
    r = Rule(FreeAtom("P", (Var("z"),)), (FreeAtom("Q", (Var("z"), Var("a"))),))
    assert str(r.canonical()) == "P(V0) :- Q(V0, V1)."


# -- size bounds ----------------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_hammered_sizes_within_closed_forms(seed):
    p = generate_instance(InstanceSpec(seed=seed, mode="forall"))
    prep, tps, h = hammer_problem(p, prune=False)
    n_goal = len(p.conjecture.variables)
    assert len(h.goal_atoms) <= len(tps) ** n_goal
    n_vars = max((len(c.vars()) for c in prep.clauses), default=0)
    assert len(h.tfacts) <= len(h.theory_predicates) * len(tps) ** n_vars
    assert not {a.pred for a in h.program.facts} & set(h.theory_predicates) - {a.pred for a in h.tfacts}
