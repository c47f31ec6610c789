"""Refutation certificates and their independent checker.

The checker trusts nothing recorded beyond the theory itself: it
re-clausifies from scratch, re-instantiates every template clause with the
recorded substitution, re-derives every equality axiom from its schema, and
decides the core with a truth table (at most ``TRUTH_TABLE_ATOMS`` atoms) or
with a DPLL procedure that shares no code with the search-side solver.

Lemma steps (optional) split a refutation into small ground lemmas: each
step's clauses, plus the negation of its lemma, must be unsatisfiable, and a
step may cite the lemmas of earlier steps.  The last step proves the empty
clause.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clausify import ClausifyError, clausify
from .ground import cong_fn_clause, cong_in_clause, instance, trans_clause
from .terms import TermSyntaxError, parse_literal, parse_term, render_literal

TRUTH_TABLE_ATOMS = 20


@dataclass
class Certificate:
    theory: str
    skolem_map: dict
    ground_clauses: list            # [{"id", "origin", "literals", "subst"? , "terms"?}]
    core: list
    mode: str = "search"
    rounds: int = 0
    steps: list = field(default_factory=list)
    propositional_status: str = "unsat"

    @property
    def instantiations(self):
        return [{"clause": g["origin"], "subst": g["subst"]}
                for g in self.ground_clauses if "subst" in g]

    @property
    def atom_count(self):
        return len(_atoms_of(self.ground_clauses))

    def to_json(self):
        out = {
            "theory": self.theory,
            "mode": self.mode,
            "rounds": self.rounds,
            "propositional_status": self.propositional_status,
            "skolem_map": self.skolem_map,
            "instantiations": self.instantiations,
            "ground_clauses": self.ground_clauses,
            "core": self.core,
            "atoms": self.atom_count,
        }
        if self.steps:
            out["steps"] = self.steps
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "Certificate":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(theory=data["theory"], skolem_map=data["skolem_map"],
                   ground_clauses=data["ground_clauses"], core=data["core"],
                   mode=data.get("mode", "search"), rounds=data.get("rounds", 0),
                   steps=data.get("steps", []),
                   propositional_status=data.get("propositional_status", "unsat"))


@dataclass
class CheckResult:
    ok: bool
    reason: str = ""
    method: str = ""
    atoms: int = 0
    divergent: Optional[dict] = None
    step_methods: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _atoms_of(records):
    atoms = set()
    for g in records:
        for lit in g["literals"]:
            atoms.add(lit.lstrip("-"))
    return atoms


# --------------------------------------------------------------------------
# Propositional deciders, independent of sat.py
# --------------------------------------------------------------------------

def truth_table_unsat(clauses, nvars) -> bool:
    """Exhaustive check over all 2^nvars assignments (nvars <= TRUTH_TABLE_ATOMS)."""
    if nvars > TRUTH_TABLE_ATOMS:
        raise ValueError("too many atoms for a truth table")
    rows = np.arange(1 << nvars, dtype=np.int64)
    bits = [((rows >> j) & 1).astype(bool) for j in range(nvars)]
    alive = np.ones(1 << nvars, dtype=bool)
    for c in clauses:
        sat = np.zeros(1 << nvars, dtype=bool)
        for l in c:
            sat |= bits[abs(l) - 1] if l > 0 else ~bits[abs(l) - 1]
        alive &= sat
        if not alive.any():
            return True
    return not alive.any()


def dpll_unsat(clauses) -> bool:
    """Recursive DPLL: unit propagation, pure literals, branch on the most
    frequent literal among the shortest clauses."""
    def assign(cs, lit):
        out = []
        for c in cs:
            if lit in c:
                continue
            if -lit in c:
                c = [l for l in c if l != -lit]
                if not c:
                    return None
            out.append(c)
        return out

    def solve(cs):
        while True:
            if cs is None:
                return False
            if not cs:
                return True
            unit = next((c[0] for c in cs if len(c) == 1), None)
            if unit is None:
                lits = {l for c in cs for l in c}
                unit = next((l for l in lits if -l not in lits), None)
                if unit is None:
                    break
            cs = assign(cs, unit)
        shortest = min(len(c) for c in cs)
        counts = {}
        for c in cs:
            if len(c) == shortest:
                for l in c:
                    counts[l] = counts.get(l, 0) + 1
        lit = max(sorted(counts), key=lambda l: counts[l] + counts.get(-l, 0))
        return solve(assign(cs, lit)) or solve(assign(cs, -lit))

    cs = [list(dict.fromkeys(c)) for c in clauses]
    if any(not c for c in cs):
        return True
    return not solve(cs)


def decide_unsat(literal_rows):
    """literal_rows: lists of rendered literals.  Returns (unsat, method, atoms)."""
    table = {}
    cnf = []
    for row in literal_rows:
        c = []
        for lit in row:
            neg = lit.startswith("-")
            a = lit[1:] if neg else lit
            v = table.setdefault(a, len(table) + 1)
            c.append(-v if neg else v)
        cnf.append(c)
    n = len(table)
    if n <= TRUTH_TABLE_ATOMS:
        return truth_table_unsat(cnf, n), "truth-table", n
    return dpll_unsat(cnf), "dpll", n


# --------------------------------------------------------------------------
# Clause re-derivation
# --------------------------------------------------------------------------

class _Mismatch(Exception):
    def __init__(self, record, reason):
        super().__init__(reason)
        self.record = record
        self.reason = reason


def _rederive(rec, templates, lemmas):
    origin = rec.get("origin", "")
    try:
        if origin.startswith("eq:"):
            args = rec.get("terms", [])
            if origin == "eq:trans" and len(args) == 3:
                lits = trans_clause(*(parse_term(a) for a in args))
            elif origin == "eq:cong-fn" and len(args) == 2:
                s, t = (parse_term(a) for a in args)
                if len(s) < 2 or s[0] != t[0] or len(s) != len(t):
                    raise _Mismatch(rec, "function congruence between different symbols")
                lits = cong_fn_clause(s, t)
            elif origin == "eq:cong-in" and len(args) == 2:
                m1, m2 = (parse_literal(a)[1] for a in args)
                if m1[0] != "in" or m2[0] != "in":
                    raise _Mismatch(rec, "membership congruence over non-membership atoms")
                lits = cong_in_clause(m1, m2)
            else:
                raise _Mismatch(rec, f"unknown equality schema {origin!r}")
        elif origin.startswith("lemma:"):
            name = origin[len("lemma:"):]
            if name not in lemmas:
                raise _Mismatch(rec, f"lemma {name!r} cited before it is proved")
            lits = lemmas[name]
        elif origin == "goal":
            return [render_literal(parse_literal(l)) for l in rec["literals"]]
        else:
            tpl = templates.get(origin)
            if tpl is None:
                raise _Mismatch(rec, f"no clause {origin!r} in the re-clausified theory")
            subst = {v: parse_term(t) for v, t in rec.get("subst", {}).items()}
            if set(subst) != set(tpl.vars):
                raise _Mismatch(rec, f"substitution domain {sorted(subst)} != clause variables {sorted(tpl.vars)}")
            lits = instance(tpl, subst)
    except TermSyntaxError as e:
        raise _Mismatch(rec, str(e)) from None
    if lits is None:
        raise _Mismatch(rec, "re-derived clause is valid, cannot be in a core")
    return [render_literal(l) for l in lits]


def _check_records(records, templates, lemmas, goal=None):
    rows = []
    for rec in records:
        got = _rederive(rec, templates, lemmas)
        if rec.get("origin") == "goal":
            if goal is None:
                raise _Mismatch(rec, "goal clause outside a lemma step")
            if len(got) != 1 or _negate(got[0]) not in goal:
                raise _Mismatch(rec, "goal clause is not the negation of a lemma literal")
        if got != list(rec["literals"]):
            raise _Mismatch(rec, f"re-derived {got} but certificate records {rec['literals']}")
        rows.append(got)
    return rows


def _negate(lit):
    return lit[1:] if lit.startswith("-") else "-" + lit


def check_certificate(cert, theory) -> CheckResult:
    """Independently verify `cert` against `theory`; falsy result explains the first failure."""
    if isinstance(cert, (dict, str)):
        cert = Certificate.from_json(cert)
    if cert.propositional_status != "unsat":
        return CheckResult(False, "certificate does not claim unsat")
    try:
        cs = clausify(theory)
    except ClausifyError as e:
        return CheckResult(False, f"theory cannot be clausified: {e}")
    fresh_map = {k: v.to_json() for k, v in cs.skolems.items()}
    if cert.skolem_map != fresh_map:
        return CheckResult(False, "Skolem map differs from a fresh clausification")
    templates = cs.by_id()
    ids = [g.get("id") for g in cert.ground_clauses]
    if sorted(cert.core) != sorted(ids) or len(set(ids)) != len(ids):
        return CheckResult(False, "core ids do not match the recorded ground clauses")
    lemmas = {}
    step_methods = []
    try:
        for step in cert.steps:
            lemma = [render_literal(parse_literal(l)) for l in step["lemma"]]
            rows = _check_records(step["ground_clauses"], templates, lemmas, goal=lemma)
            unsat, method, n = decide_unsat(rows)
            if not unsat:
                return CheckResult(False, f"step {step['name']!r}: clauses do not entail its lemma",
                                   step_methods=step_methods)
            lemmas[step["name"]] = [parse_literal(l) for l in lemma]
            step_methods.append((step["name"], method, n))
        rows = _check_records(cert.ground_clauses, templates, lemmas)
    except _Mismatch as m:
        return CheckResult(False, m.reason, divergent=m.record, step_methods=step_methods)
    except (KeyError, TermSyntaxError) as e:
        return CheckResult(False, f"malformed certificate: {e}", step_methods=step_methods)
    if cert.steps and [] not in [lemmas.get(s["name"]) for s in cert.steps[-1:]]:
        return CheckResult(False, "last step does not prove the empty clause", step_methods=step_methods)
    unsat, method, n = decide_unsat(rows)
    if not unsat:
        return CheckResult(False, "core is propositionally satisfiable", method, n,
                           step_methods=step_methods)
    return CheckResult(True, "", method, n, step_methods=step_methods)
