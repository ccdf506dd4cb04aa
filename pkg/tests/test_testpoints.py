from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slrhammer.errors import MalformedBorders
from slrhammer.logic import Num, TheoryAtom, Var, compare
from slrhammer.parser import parse_clause, parse_problem
from slrhammer.testpoints import (
    LOWER_SENTINEL, UPPER_SENTINEL, bound_borders, build_partition, compute_endpoints, idef, make_test_points,
)

from conftest import IGNITION

F = Fraction


def borders_of(*clauses):
    return compute_endpoints([parse_clause(c) for c in clauses])


def shown(borders):
    return [str(b) for b in sorted(borders)]


def test_endpoints_lt_and_eq():
    b = borders_of("x < 5 || P(x)", "x = 0 || P(x)")
    assert shown(b) == ["(-inf", "0)", "[0", "0]", "(0", "5)", "[5", "inf)"]
    assert [str(i) for i in build_partition(b)] == ["(-inf,0)", "[0,0]", "(0,5)", "[5,inf)"]


def test_endpoints_running_example(running_clauses):
    b = compute_endpoints(running_clauses)
    assert shown(b) == ["(-inf", "0)", "[0", "1]", "(1", "2]", "(2", "inf)"]
    assert [str(i) for i in build_partition(b)] == ["(-inf,0)", "[0,1]", "(1,2]", "(2,inf)"]


def test_no_theory_atoms():
    b = borders_of("P(x)")
    assert b == {LOWER_SENTINEL, UPPER_SENTINEL}
    assert [str(i) for i in build_partition(b)] == ["(-inf,inf)"]


def test_malformed_borders():
    with pytest.raises(MalformedBorders):
        build_partition({LOWER_SENTINEL})
    with pytest.raises(MalformedBorders):
        build_partition({LOWER_SENTINEL, UPPER_SENTINEL} | {next(iter(bound_borders("<", F(1))))})


def test_test_points_running_example(running_clauses):
    part = build_partition(compute_endpoints(running_clauses))
    tps = make_test_points(part, 1)
    assert [tps.label(p) for p in tps.all_points()] == [
        "a_{(-inf,0),1}", "a_{[0,1],1}", "a_{(1,2],1}", "a_{(2,inf),1}"]
    assert [tps.beta[p] for p in tps.all_points()] == [F(-1), F(1, 2), F(3, 2), F(3)]
    assert len(make_test_points(part, 2)) == 8


def test_default_beta_m2(running_clauses):
    tps = make_test_points(build_partition(compute_endpoints(running_clauses)), 2)
    assert [tps.beta[p] for p in tps.all_points()] == [F(-1), F(-2), F(1, 3), F(2, 3), F(4, 3), F(5, 3), F(3), F(4)]


def test_custom_beta(running_clauses):
    part = build_partition(compute_endpoints(running_clauses))
    picks = dict(zip(part, ([F(-1)], [F(0)], [F(2)], [F(3)])))
    tps = make_test_points(part, 1, picks)
    assert sorted(tps.beta.values()) == [F(-1), F(0), F(2), F(3)]
    with pytest.raises(ValueError):
        make_test_points(part, 1, {part[0]: [F(0)]})  # 0 lies outside (-inf,0)


def test_point_interval_gets_single_point():
    part = build_partition(borders_of("x = 0 || P(x)"))
    tps = make_test_points(part, 3)
    assert [len(tps.points[iv]) for iv in part] == [3, 1, 3]


def test_idef_running_example(running_clauses):
    tps = make_test_points(build_partition(compute_endpoints(running_clauses)), 1)
    assert [str(a) for a in idef(tps)] == [
        "a0_1 < 0", "0 <= a1_1", "a1_1 <= 1", "1 < a2_1", "a2_1 <= 2", "2 < a3_1"]


def test_idef_unbounded_interval_is_empty():
    tps = make_test_points(build_partition({LOWER_SENTINEL, UPPER_SENTINEL}), 1)
    assert idef(tps) == []


def test_grounded_bounds_are_instantiated():
    b = compute_endpoints(parse_problem(IGNITION).clauses)
    assert "[2200" in shown(b) and "(2200" in shown(b)


# -- properties --------------------------------------------------------------

OPS = ["<=", "<", "=", "!=", ">", ">="]
bounds = st.lists(st.tuples(st.sampled_from(OPS), st.fractions(-20, 20, max_denominator=4)), max_size=8)


def _partition(spec):
    borders = {LOWER_SENTINEL, UPPER_SENTINEL}
    for op, c in spec:
        borders |= bound_borders(op, c)
    return build_partition(borders)


@given(bounds, st.fractions(-25, 25, max_denominator=8))
def test_partition_covers_line_exactly_once(spec, v):
    part = _partition(spec)
    assert sum(iv.contains(v) for iv in part) == 1
    # every value behaves like its interval's test point
    tps = make_test_points(part, 1)
    (home,) = [iv for iv in part if iv.contains(v)]
    rep = tps.beta[tps.points[home][0]]
    assert all(compare(v, op, c) == compare(rep, op, c) for op, c in spec)


@given(bounds, st.integers(1, 3))
def test_bounds_are_constant_on_intervals(spec, m):
    part = _partition(spec)
    tps = make_test_points(part, m)
    x = Var("x")
    for op, c in spec:
        atom = TheoryAtom(x, op, Num(c))
        for iv in part:
            truth = {atom.evaluate({x: tps.beta[p]}) for p in tps.points[iv]}
            assert len(truth) == 1


@given(bounds, st.integers(1, 3))
def test_test_points_distinct_and_inside(spec, m):
    part = _partition(spec)
    tps = make_test_points(part, m)
    for iv in part:
        vals = [tps.beta[p] for p in tps.points[iv]]
        assert len(set(vals)) == len(vals) == (1 if iv.is_point else m)
        assert all(iv.contains(v) for v in vals)
        for a in idef(tps):
            assert a.evaluate(tps.beta)
