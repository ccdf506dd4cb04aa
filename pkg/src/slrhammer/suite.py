"""Property suite: every generated instance is decided several independent
ways and the answers are compared.

Checks per instance (a check only counts where it applies):

``verdict``   Datalog route against the ground oracle
``direct``    Datalog route against the test-point free reference
``tfacts``    tabulated theory facts against an exhaustive recheck
``engine``    semi-naive against naive saturation (programs up to 10^4 facts)
``model``     counter-models satisfy the clauses and refute the conjecture
``variants``  symmetry reduction and the stratified goal leave the verdict alone
``oracle``    Horn saturation against truth-table enumeration in the oracle
``elim``      resolving away positively grounded predicates keeps the verdict
``flatten``   flattened goal against direct evaluation of the formula

Failing instances are shrunk (clause deletion, then constants toward 0)
and written out as problem files.
"""

from __future__ import annotations

import re
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from .engine import naive_saturate
from .errors import HammerError, ParseError
from .formula import Problem, free_atoms
from .generator import InstanceSpec, generate_text
from .logic import FreeAtom
from .oracle import check_model, direct_decide, enumerate_assignments, ground_problem, recheck_tfacts, solve
from .parser import parse_problem
from .pipeline import decide, decide_ground
from .preprocess import find_positively_grounded

CHECKS = ("verdict", "direct", "tfacts", "engine", "model", "variants", "oracle", "elim", "flatten")
ENGINE_FACT_LIMIT = 10**4
ORACLE_CROSS_ATOMS = 16


@dataclass
class InstanceReport:
    seed: int
    mode: str
    entailed: bool | None
    passed: list[str] = field(default_factory=list)
    failed: list[str] = field(default_factory=list)
    error: str | None = None


def _elim_applies(problem: Problem) -> bool:
    conj = problem.conjecture
    exclude = {a.pred for a in free_atoms(conj.body)} if conj else set()
    g = find_positively_grounded(problem.clauses, exclude)
    return any(not l.positive and l.pred in g for c in problem.clauses for l in c.literals)


def check_problem(problem: Problem) -> tuple[list[str], list[str], bool]:
    """Run all applicable checks; returns (passed, failed, entailed)."""
    passed: list[str] = []
    failed: list[str] = []

    def record(name: str, ok: bool) -> None:
        (passed if ok else failed).append(name)

    main = decide(problem, route="datalog")
    ground = decide_ground(problem)
    record("verdict", main.entailed == ground.entailed)
    record("direct", direct_decide(problem).entailed == main.entailed)

    hres, tps = main.hammer, main.test_points
    record("tfacts", recheck_tfacts(hres.theory_predicates, tps, hres.tfacts))
    if len(hres.program.facts) <= ENGINE_FACT_LIMIT:
        record("engine", naive_saturate(hres.program).facts() == main.least_model.facts())

    if not main.entailed:
        preds = set(problem.arities)
        interp = {a for a in main.least_model.facts() if a.pred in preds}
        ok = check_model(problem.clauses, problem.conjecture, tps, interp)
        if ground.model is not None:
            ginterp = {FreeAtom(p, t) for p, rows in ground.model.extensions.items() for t in rows}
            ok = ok and check_model(problem.clauses, problem.conjecture, ground.test_points, ginterp)
        record("model", ok)

    other = decide(problem, route="datalog", symmetry=True, stratified=True)
    record("variants", other.entailed == main.entailed)

    gp = ground_problem(ground.abstraction)
    res = solve(gp)
    if res.method == "horn" and len(gp.atoms) <= ORACLE_CROSS_ATOMS:
        record("oracle", enumerate_assignments(gp).satisfiable == res.satisfiable)

    if _elim_applies(problem):
        record("elim", decide_ground(problem, elim_passes=1).entailed == ground.entailed)

    conj = problem.conjecture
    if conj is not None and conj.variables:
        record("flatten", decide(problem, route="datalog", prune=False).entailed == ground.entailed)
    return passed, failed, main.entailed


def run_instance(spec: InstanceSpec) -> InstanceReport:
    text = generate_text(spec)
    problem = parse_problem(text)
    try:
        passed, failed, entailed = check_problem(problem)
    except HammerError as exc:
        return InstanceReport(spec.seed, problem.mode, None, error=f"{type(exc).__name__}: {exc}")
    return InstanceReport(spec.seed, problem.mode, entailed, passed, failed)


@dataclass
class SuiteReport:
    instances: list[InstanceReport]
    elapsed: float
    repros: list[Path] = field(default_factory=list)

    def counts(self) -> dict[str, tuple[int, int]]:
        """check -> (passed, applicable)."""
        ok, total = Counter(), Counter()
        for r in self.instances:
            for name in r.passed:
                ok[name] += 1
                total[name] += 1
            for name in r.failed:
                total[name] += 1
        return {name: (ok[name], total[name]) for name in CHECKS}

    @property
    def failures(self) -> list[InstanceReport]:
        return [r for r in self.instances if r.failed or r.error]

    @property
    def ok(self) -> bool:
        return not self.failures

    def modes(self) -> Counter:
        return Counter(r.mode for r in self.instances)

    def summary(self) -> str:
        lines = [f"{len(self.instances)} instances in {self.elapsed:.1f}s; modes {dict(sorted(self.modes().items()))}"]
        for name, (ok, total) in self.counts().items():
            lines.append(f"  {name:9s} {ok}/{total}")
        for r in self.failures:
            lines.append(f"  seed {r.seed}: {', '.join(r.failed) or r.error}")
        return "\n".join(lines)


def run_property_suite(count: int, spec: InstanceSpec | None = None, workers: int = 1,
                       repro_dir: str | Path | None = None) -> SuiteReport:
    """Check ``count`` instances with seeds ``spec.seed``, ``spec.seed + 1``, ...

    Failures are reported, not raised.  With ``repro_dir`` set, each failing
    instance is minimised and written there.
    """
    spec = spec or InstanceSpec(seed=0)
    specs = [replace(spec, seed=spec.seed + k) for k in range(count)]
    t0 = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            reports = list(pool.map(run_instance, specs, chunksize=8))
    else:
        reports = [run_instance(s) for s in specs]
    report = SuiteReport(reports, time.perf_counter() - t0)
    if repro_dir is not None:
        out = Path(repro_dir)
        for r in report.failures:
            if not r.failed:
                continue
            text = generate_text(replace(spec, seed=r.seed))
            small = minimize(text, _still_fails(set(r.failed)))
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"seed-{r.seed}.slr"
            path.write_text(f"% failing checks: {', '.join(r.failed)}\n" + small)
            report.repros.append(path)
    return report


# -- minimisation ----------------------------------------------------------

_INT = re.compile(r"(?<![\w/.])-?\d+(?![\w/])")


def _still_fails(checks: set[str]) -> Callable[[str], bool]:
    def fails(text: str) -> bool:
        try:
            _, failed, _ = check_problem(parse_problem(text))
        except (HammerError, ParseError):
            return False
        return bool(checks & set(failed))
    return fails


def _shrink_candidates(v: int) -> list[int]:
    out = [0, v // 2 if v > 0 else -((-v) // 2), v - 1 if v > 0 else v + 1]
    return [c for c in dict.fromkeys(out) if abs(c) < abs(v)]


def minimize(text: str, fails: Callable[[str], bool]) -> str:
    """Greedy clause deletion followed by shrinking integer constants toward 0."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("%")]
    k = 0
    while k < len(lines):
        if lines[k].startswith("conjecture"):
            k += 1
            continue
        trial = lines[:k] + lines[k + 1:]
        if fails("\n".join(trial) + "\n"):
            lines = trial
        else:
            k += 1
    current = "\n".join(lines) + "\n"
    changed = True
    while changed:
        changed = False
        for m in list(_INT.finditer(current)):
            for c in _shrink_candidates(int(m.group())):
                trial = current[:m.start()] + str(c) + current[m.end():]
                if fails(trial):
                    current, changed = trial, True
                    break
            if changed:
                break
    return current
