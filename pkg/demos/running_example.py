# The running example, end to end.
#
# Three clauses over one rational variable, a handful of conjectures, and
# every intermediate object the Datalog route builds on the way to a verdict.

from slrhammer import decide, decide_ground, parse_problem
from slrhammer.datalog import export_datalog
from slrhammer.oracle import enumerate_assignments, ground_problem
from slrhammer.pipeline import ground_problem_abstraction, hammer_problem
from slrhammer.testpoints import build_partition, compute_endpoints, make_test_points

CLAUSES = """\
clause 0 <= x, x <= 2 || !P(x), Q(x).
clause x <= 1 || P(x).
clause x > 1 || !P(x).
"""

# ## Borders and intervals
#
# Every bound in a clause constraint contributes borders; sorting them cuts
# the rationals into intervals on which all constraints are constant.

clauses = parse_problem(CLAUSES, allow_negative=True).clauses
borders = compute_endpoints(clauses)
print("borders:", " ".join(str(b) for b in sorted(borders)))
partition = build_partition(borders)
print("partition:", ", ".join(str(iv) for iv in partition))

# ## Test points
#
# One representative per interval is enough for a single variable; two
# variables in one clause need two, so that x < y stays satisfiable inside
# an interval.

for m in (1, 2):
    tps = make_test_points(partition, m)
    print(f"m={m}:", ", ".join(f"{tps.label(p)}={v}" for p, v in tps.values().items()))

# ## Entailment
#
# Q covers [0,1] but not all of [0,2]; when the goal is missing the
# saturated program doubles as a counter-model.

phi3 = parse_problem(CLAUSES + "conjecture forall x. (0 <= x, x <= 1 || Q(x)).\n", allow_negative=True)
phi4 = parse_problem(CLAUSES + "conjecture forall x. (0 <= x, x <= 2 || Q(x)).\n", allow_negative=True)

for name, p in (("phi3", phi3), ("phi4", phi4)):
    v = decide(p)
    print(name, v.status, f"via {v.route}")
    if v.model is not None:
        print(v.model)

# The program itself, in plain Datalog syntax.

_, _, h = hammer_problem(phi4)
print(export_datalog(h.program))

# ## The ground route
#
# Instantiating every clause over the test points gives a propositional
# problem small enough to enumerate outright.

_, tps, psi = ground_problem_abstraction(phi4)
gp = ground_problem(psi)
res = enumerate_assignments(gp)
print(f"{len(gp.atoms)} ground atoms, satisfiable: {res.satisfiable}")
print("ground route agrees:", decide_ground(phi4).status == decide(phi4).status)
