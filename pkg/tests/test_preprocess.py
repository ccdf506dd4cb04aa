import pytest

from slrhammer.errors import CombinatorialLimit, NonPositiveConjecture
from slrhammer.formula import Conjecture, Not
from slrhammer.logic import FreeAtom, Var
from slrhammer.oracle import direct_decide
from slrhammer.parser import parse_problem
from slrhammer.pipeline import decide, decide_ground
from slrhammer.preprocess import (
    elim, elim_rounds, find_positively_grounded, flatten_conjecture, reduce_existential, split_guard,
)

from conftest import IGNITION, RUNNING_CLAUSES, running


def strs(clauses):
    return [str(c) for c in clauses]


def test_ignition_table_is_positively_grounded():
    g = find_positively_grounded(parse_problem(IGNITION).clauses)
    assert g.predicates == {"IgnTable"}
    assert len(g.facts["IgnTable"]) == 1


def test_running_example_has_no_grounded_predicates(running_clauses):
    assert not find_positively_grounded(running_clauses).predicates


def test_empty_clause_set():
    assert not find_positively_grounded([]).predicates


def test_exclude_keeps_predicate_out():
    g = find_positively_grounded(parse_problem(IGNITION).clauses, exclude={"IgnTable"})
    assert not g.predicates


def test_elim_ignition_table():
    clauses = parse_problem(IGNITION).clauses
    out = elim(find_positively_grounded(clauses), clauses)
    assert strs(out) == ["z2 >= 2200 || R(z2)", str(clauses[1])]


def test_elim_without_grounded_predicates_is_identity(running_clauses):
    assert elim(find_positively_grounded(running_clauses), running_clauses) == list(running_clauses)


def test_elim_two_negative_occurrences_three_facts():
    clauses = parse_problem("fact T(1).\nfact T(2).\nfact T(3).\nclause !T(x), !T(y), P(x, y).").clauses
    out = elim(find_positively_grounded(clauses), clauses, prune=False)
    resolvents = [c for c in out if c.literals[0].pred == "P"]
    assert len(resolvents) == 9
    assert len({c for c in resolvents}) == 9


def test_elim_prunes_unsatisfiable_resolvents():
    clauses = parse_problem("fact T(1).\nfact T(5).\nclause x > 3 || !T(x), P(x).").clauses
    kept = elim(find_positively_grounded(clauses), clauses, prune=True)
    full = elim(find_positively_grounded(clauses), clauses, prune=False)
    assert len([c for c in full if c.literals[0].pred == "P"]) == 2
    assert len([c for c in kept if c.literals[0].pred == "P"]) == 1


def test_elim_cap():
    text = "".join(f"fact T({k}).\n" for k in range(10)) + "clause !T(x), !T(y), !T(z), P(x, y, z).\n"
    clauses = parse_problem(text).clauses
    with pytest.raises(CombinatorialLimit):
        elim(find_positively_grounded(clauses), clauses, cap=100)


def test_elim_rounds_excludes_conjecture_predicates():
    clauses = parse_problem(IGNITION).clauses
    assert elim_rounds(clauses, 1, exclude={"IgnTable"}) == list(clauses)


def test_flatten_guarded_goal(phi3):
    fr = flatten_conjecture(phi3.conjecture)
    assert str(fr.goal) == "_flat0(x)"
    assert strs(fr.definitions) == ["0 > x || _flat0(x)", "x > 1 || _flat0(x)", "!Q(x) \\/ _flat0(x)"]


def test_flatten_single_atom():
    conj = parse_problem("conjecture forall x. P(x).").conjecture
    fr = flatten_conjecture(conj)
    assert fr.goal == FreeAtom("P", (Var("x"),)) and fr.definitions == []


def test_flatten_and_under_or():
    conj = parse_problem("conjecture forall x. ((A(x) /\\ B(x)) \\/ C(x)).").conjecture
    fr = flatten_conjecture(conj)
    assert str(fr.goal) == "_flat0(x)"
    assert strs(fr.definitions) == ["!A(x) \\/ !B(x) \\/ _flat1(x)", "!_flat1(x) \\/ _flat0(x)",
                                    "!C(x) \\/ _flat0(x)"]
    assert all(c.is_horn() for c in fr.definitions)


def test_flatten_rejects_negative_literal():
    conj = Conjecture("forall", (Var("x"),), Not(FreeAtom("P", (Var("x"),))))
    with pytest.raises(NonPositiveConjecture):
        flatten_conjecture(conj)


def test_split_guard(phi3):
    fr = split_guard(phi3.conjecture)
    assert str(fr.goal) == "Q(x)"
    assert [str(a) for a in fr.guard] == ["0 <= x", "x <= 1"]
    assert split_guard(parse_problem("conjecture forall x. (P(x) \\/ Q(x)).").conjecture) is None


def test_reduce_existential_adds_refutation_clause():
    p = running("conjecture exists x. Q(x).\n")
    out = reduce_existential(p.conjecture, p.clauses)
    assert str(out[-1]) == "!Q(x)"


@pytest.mark.parametrize("conjecture, status", [
    ("conjecture exists x. Q(x).", "ENTAILED"),
    # the constraint has no solution, so no witness exists
    ("conjecture exists x. (x > 2 /\\ x <= 2 /\\ Q(x)).", "NOT ENTAILED"),
])
def test_existential_running_example(conjecture, status):
    p = running(conjecture + "\n")
    assert decide(p).status == status
    assert decide_ground(p).status == status
    assert direct_decide(p).entailed == (status == "ENTAILED")


def test_existential_witnessed_by_fact():
    assert decide(parse_problem("fact P(0).\nconjecture exists x. P(x).")).status == "ENTAILED"


@pytest.mark.parametrize("text, status", [
    ("", "SATISFIABLE"),
    ("fact P(0).\nclause P(x) -> false.", "UNSATISFIABLE"),
    (RUNNING_CLAUSES, "SATISFIABLE"),
    (RUNNING_CLAUSES + "conjecture forall. false.", "SATISFIABLE"),
])
def test_satisfiability_mode(text, status):
    p = parse_problem(text)
    assert decide(p).status == status
    assert decide_ground(p).status == status
