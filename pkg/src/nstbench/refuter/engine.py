"""Refutation by ground instantiation.

Unguided: round r instantiates every clause over the ground terms of depth
at most r, adds the equality axioms, and asks the SAT solver.  A subset of
the axiom instances that is already contradictory refutes the whole theory,
so each round escalates through three stages: the instances alone, then
with equality axioms, then with the extensionality instances too (their
``y = z`` literals join every term into one equality component).  Hinted: only
the listed instances are grounded and one SAT call decides.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..syntax import fresh_name
from .certificate import Certificate, check_certificate
from .clausify import ClausifyError, clausify
from .ground import GroundClause, GroundProblem, equality_clauses, instance, term_pool
from .sat import minimize_core, sat_solve
from .terms import TermSyntaxError, parse_literal, parse_term, render, render_atom, render_literal


@dataclass(frozen=True)
class Bounds:
    rounds: int = 3
    max_pool: int = 400
    max_instances: int = 200_000        # per round
    max_equality_clauses: int = 400_000
    time_limit: Optional[float] = 60.0
    minimize: bool = True

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")


@dataclass
class RefutationOutcome:
    status: str                         # "unsat" | "unknown"
    certificate: Optional[Certificate] = None
    rounds_done: int = 0
    pool_size: int = 0
    reason: Optional[str] = None
    stats: dict = field(default_factory=dict)

    @property
    def unsat(self) -> bool:
        return self.status == "unsat"

    def to_json(self):
        out = {"status": self.status, "rounds_done": self.rounds_done, "pool_size": self.pool_size,
               "stats": self.stats}
        if self.reason:
            out["reason"] = self.reason
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


class HintError(ValueError):
    pass


def load_hints(path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict) or "instantiations" not in data:
        raise HintError(f"{path}: expected an object with an 'instantiations' list")
    return data


# --------------------------------------------------------------------------
# Shared pieces
# --------------------------------------------------------------------------

def _record(idx, gc: GroundClause):
    out = {"id": idx, "origin": gc.origin, "literals": [render_literal(l) for l in gc.literals]}
    if gc.subst:
        out["subst"] = {v: render(t) for v, t in gc.subst}
    if gc.terms:
        if gc.origin == "eq:cong-in":
            out["terms"] = [render_atom(a) for a in gc.terms]
        else:
            out["terms"] = [render(t) for t in gc.terms]
    return out


def _solve(problem, eq_limit):
    """Ground problem plus equality axioms, one SAT call; None when over the cap.

    eq_limit 0 leaves the equality axioms out altogether.
    """
    eq = equality_clauses(problem.clauses, eq_limit) if eq_limit != 0 else []
    if eq is None:
        return None, None, None
    cnf, _, allc = problem.encode(eq)
    return sat_solve(cnf), cnf, allc


def _without_exten(problem):
    sub = GroundProblem()
    for gc in problem.clauses:
        if not gc.origin.startswith("exten#"):
            sub.add(gc)
    return sub


def _instantiate(clause, subst):
    lits = instance(clause, subst)
    if lits is None:
        return None
    return GroundClause(lits, clause.id, tuple((v, subst[v]) for v in clause.vars))


def _certificate(cs, theory, allc, core, mode, rounds, steps=()):
    records = [_record(i, allc[i]) for i in core]
    skmap = {k: v.to_json() for k, v in cs.skolems.items()}
    return Certificate(theory.name, skmap, records, list(core), mode, rounds, list(steps))


# --------------------------------------------------------------------------
# Unguided search
# --------------------------------------------------------------------------

def refute(theory, bounds: Bounds = Bounds(), hints=None) -> RefutationOutcome:
    """Try to show `theory` inconsistent; Unknown is never a consistency claim."""
    t0 = time.monotonic()
    try:
        cs = clausify(theory)
    except ClausifyError as e:
        return RefutationOutcome("unknown", reason=f"clausify: {e}")
    if hints is not None:
        if isinstance(hints, (str, Path)):
            hints = load_hints(hints)
        return _refute_hinted(theory, cs, hints, bounds, t0)

    deadline = None if bounds.time_limit is None else t0 + bounds.time_limit
    funcs = cs.function_symbols()
    consts = list(theory.constants) + sorted(f for f, k in funcs.items() if k == 0)
    if not consts:
        consts = [fresh_name("c", set(funcs))]
    clauses = sorted(cs.clauses, key=lambda c: (c.label, int(c.id.rsplit("#", 1)[1])))
    problem = GroundProblem()
    prev = 0
    stats = {"sat_calls": 0, "instances": 0}
    pool = []
    for r in range(1, bounds.rounds + 1):
        pool = term_pool(r, consts, funcs)
        if len(pool) > bounds.max_pool:
            return RefutationOutcome("unknown", rounds_done=r - 1, pool_size=len(pool),
                                     reason="pool", stats=stats)
        capped = False
        made = 0
        for c in clauses:
            k = len(c.vars)
            for idx in itertools.product(range(len(pool)), repeat=k):
                if k and max(idx) < prev:
                    continue
                if not k and r > 1:
                    break
                if made >= bounds.max_instances:
                    capped = True
                    break
                if deadline is not None and made % 2048 == 0 and time.monotonic() > deadline:
                    return RefutationOutcome("unknown", rounds_done=r - 1, pool_size=len(pool),
                                             reason="time", stats=stats)
                gc = _instantiate(c, dict(zip(c.vars, (pool[i] for i in idx))))
                made += 1
                if gc is not None:
                    problem.add(gc)
            if capped:
                break
        stats["instances"] += made
        lean = _without_exten(problem)
        stages = [(lean, False), (lean, True), (problem, True)]
        if len(lean.clauses) == len(problem.clauses):
            del stages[1]
        res, over = None, False
        for stage, with_eq in stages:
            got, cnf, allc = _solve(stage, bounds.max_equality_clauses if with_eq else 0)
            if got is None:
                over = True
                continue
            res = got
            stats["sat_calls"] += 1
            stats["ground_clauses"] = len(allc)
            if res.unsat:
                break
        if res is None or (over and not res.unsat):
            return RefutationOutcome("unknown", rounds_done=r - 1, pool_size=len(pool),
                                     reason="cap", stats=stats)
        if res.unsat:
            core = minimize_core(cnf, res.core) if bounds.minimize else res.core
            cert = _certificate(cs, theory, allc, core, "search", r)
            return _verified(cert, theory, r, len(pool), stats, t0)
        if capped:
            return RefutationOutcome("unknown", rounds_done=r, pool_size=len(pool),
                                     reason="cap", stats=stats)
        if deadline is not None and time.monotonic() > deadline:
            return RefutationOutcome("unknown", rounds_done=r, pool_size=len(pool),
                                     reason="time", stats=stats)
        prev = len(pool)
    stats["seconds"] = round(time.monotonic() - t0, 6)
    return RefutationOutcome("unknown", rounds_done=bounds.rounds, pool_size=len(pool),
                             reason="rounds", stats=stats)


def _verified(cert, theory, rounds, pool_size, stats, t0):
    check = check_certificate(cert, theory)
    stats["seconds"] = round(time.monotonic() - t0, 6)
    stats["check"] = check.method
    if not check:
        # a refutation we cannot certify is not reported
        return RefutationOutcome("unknown", rounds_done=rounds, pool_size=pool_size,
                                 reason=f"certificate rejected: {check.reason}", stats=stats)
    return RefutationOutcome("unsat", cert, rounds, pool_size, None, stats)


# --------------------------------------------------------------------------
# Hinted replay
# --------------------------------------------------------------------------

def _hint_instances(cs, items):
    templates = cs.by_id()
    out = []
    for item in items:
        cid = item.get("clause")
        tpl = templates.get(cid)
        if tpl is None:
            raise HintError(f"hint names unknown clause {cid!r}")
        try:
            subst = {v: parse_term(t) for v, t in item.get("subst", {}).items()}
        except TermSyntaxError as e:
            raise HintError(f"{cid}: {e}") from None
        if set(subst) != set(tpl.vars):
            raise HintError(f"{cid}: substitution must bind exactly {list(tpl.vars)}")
        gc = _instantiate(tpl, subst)
        if gc is not None:
            out.append(gc)
    return out


def _prove_step(cs, step, lemmas, bounds):
    """Ground clauses of a minimal core showing the step's lemma."""
    problem = GroundProblem()
    for gc in _hint_instances(cs, step.get("instantiations", [])):
        problem.add(gc)
    for name in step.get("uses", []):
        if name not in lemmas:
            raise HintError(f"step {step['name']!r} uses unknown lemma {name!r}")
        problem.add(GroundClause(lemmas[name], f"lemma:{name}"))
    lemma = tuple(parse_literal(l) for l in step.get("lemma", []))
    for sign, atom in lemma:
        problem.add(GroundClause(((not sign, atom),), "goal"))
    res, cnf, allc = _solve(problem, bounds.max_equality_clauses)
    if res is None or not res.unsat:
        raise HintError(f"step {step['name']!r} does not establish its lemma")
    core = minimize_core(cnf, res.core)
    records = [_record(i, allc[i]) for i in core]
    return lemma, {"name": step["name"], "lemma": [render_literal(l) for l in lemma],
                   "ground_clauses": records}


def _refute_hinted(theory, cs, hints, bounds, t0):
    steps = hints.get("steps", [])
    problem = GroundProblem()
    try:
        for gc in _hint_instances(cs, hints.get("instantiations", [])):
            problem.add(gc)
        for step in steps:
            for gc in _hint_instances(cs, step.get("instantiations", [])):
                problem.add(gc)
    except HintError as e:
        return RefutationOutcome("unknown", reason=f"hints: {e}")
    res, cnf, allc = _solve(problem, bounds.max_equality_clauses)
    if res is None:
        return RefutationOutcome("unknown", reason="cap")
    stats = {"sat_calls": 1, "ground_clauses": len(allc), "instances": len(problem.clauses)}
    if not res.unsat:
        stats["seconds"] = round(time.monotonic() - t0, 6)
        return RefutationOutcome("unknown", reason="hints insufficient", stats=stats)
    core = minimize_core(cnf, res.core) if bounds.minimize else res.core
    step_records = []
    if steps:
        lemmas = {}
        try:
            for step in steps:
                lemma, rec = _prove_step(cs, step, lemmas, bounds)
                lemmas[step["name"]] = lemma
                step_records.append(rec)
        except HintError as e:
            stats["steps_error"] = str(e)
            step_records = []
    cert = _certificate(cs, theory, allc, core, "hinted", 0, step_records)
    return _verified(cert, theory, 0, 0, stats, t0)
