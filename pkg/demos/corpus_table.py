# Verdicts and timings for every problem in corpus/.
#
# The t/h/r columns split the Datalog route into test point computation,
# translation, and saturation. Absolute times depend on the machine.

import time
from pathlib import Path

from slrhammer import decide, parse_problem

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

rows = []
for entry in sorted(p for p in CORPUS.iterdir() if (p / "problem.slr").exists()):
    problem = parse_problem((entry / "problem.slr").read_text(), allow_negative=True)
    t0 = time.perf_counter()
    v = decide(problem)
    total = time.perf_counter() - t0
    s = v.stats
    rows.append((entry.name, len(problem.clauses), len(v.test_points), v.route, v.status,
                 s.get("t-time", 0.0), s.get("h-time", 0.0), s.get("r-time", 0.0), total))

print(f"{'problem':28} {'|N|':>4} {'|B|':>5} {'route':8} {'verdict':14} {'t':>7} {'h':>7} {'r':>7} {'total':>7}")
for name, n, b, route, status, t, h, r, total in rows:
    print(f"{name:28} {n:>4} {b:>5} {route:8} {status:14} {t:7.3f} {h:7.3f} {r:7.3f} {total:7.3f}")

# The expected verdicts live next to each problem; any mismatch is a bug.

for name, _n, _b, _route, status, *_ in rows:
    want = dict(l.split(":", 1) for l in (CORPUS / name / "expected.txt").read_text().splitlines() if ":" in l)
    if want["verdict"].strip() != status:
        print(f"MISMATCH {name}: expected {want['verdict'].strip()}, got {status}")
