# How the Datalog route scales with the number of intervals.
#
# The generated ECU-style problem has one table row per band of engine
# speeds; each row adds borders, so |B| grows linearly with the rows while
# the conjecture keeps a single universal variable.

import time

from slrhammer import decide, parse_problem
from slrhammer.generator import ecu_scaling_text

print(f"{'rows':>5} {'clauses':>8} {'|B|':>5} {'verdict':10} {'seconds':>8}")
for rows in (10, 25, 50, 100, 150):
    problem = parse_problem(ecu_scaling_text(rows=rows))
    t0 = time.perf_counter()
    v = decide(problem)
    dt = time.perf_counter() - t0
    print(f"{rows:>5} {len(problem.clauses):>8} {len(v.test_points):>5} {v.status:10} {dt:8.2f}")
