"""CDCL SAT solver with unsat-core extraction.

Clauses are lists of non-zero ints (DIMACS style).  Learned clauses record
the clauses they were resolved from, so an UNSAT answer comes with a core:
a subset of the input clauses that is itself unsatisfiable.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class SatResult:
    status: str                         # "sat" | "unsat" | "unknown"
    model: dict = field(default_factory=dict)
    core: list = field(default_factory=list)
    conflicts: int = 0

    @property
    def unsat(self):
        return self.status == "unsat"


def _luby(i):
    """i-th term (1-based) of the Luby restart sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        if (1 << (k - 1)) <= i < (1 << k) - 1:
            i -= (1 << (k - 1)) - 1
            k = 1
            continue
        k += 1


class _Solver:
    def __init__(self, clauses, nvars):
        self.n = nvars
        self.clauses = []
        self.antecedents = []           # None for input clauses
        self.n_input = 0
        self.val = [0] * (nvars + 1)
        self.level = [0] * (nvars + 1)
        self.reason = [-1] * (nvars + 1)
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.watches = {}
        self.activity = [0.0] * (nvars + 1)
        self.inc = 1.0
        self.phase = [False] * (nvars + 1)
        self.heap = [(0.0, v) for v in range(1, nvars + 1)]
        heapq.heapify(self.heap)
        self.conflicts = 0
        self.empty_input = None
        for c in clauses:
            self._add_input(c)

    def _add_input(self, lits):
        idx = len(self.clauses)
        seen, out = set(), []
        for l in lits:
            if l not in seen:
                seen.add(l)
                out.append(l)
        self.clauses.append(out)
        self.antecedents.append(None)
        self.n_input += 1
        if not out and self.empty_input is None:
            self.empty_input = idx
        if any(-l in seen for l in out):
            self.clauses[idx] = None    # tautology: never useful in a core
            return
        if len(out) >= 2:
            self.watches.setdefault(out[0], []).append(idx)
            self.watches.setdefault(out[1], []).append(idx)

    def value(self, lit):
        v = self.val[abs(lit)]
        return v if lit > 0 else -v

    def assign(self, lit, reason):
        v = abs(lit)
        self.val[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def propagate(self):
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = self.watches.get(false_lit)
            if not ws:
                continue
            i = 0
            keep = []
            conflict = None
            while i < len(ws):
                ci = ws[i]
                i += 1
                c = self.clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                if self.value(c[0]) == 1:
                    keep.append(ci)
                    continue
                moved = False
                for k in range(2, len(c)):
                    if self.value(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        self.watches.setdefault(c[1], []).append(ci)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(ci)
                if self.value(c[0]) == -1:
                    conflict = ci
                    keep.extend(ws[i:])
                    break
                self.assign(c[0], ci)
            self.watches[false_lit] = keep
            if conflict is not None:
                return conflict
        return None

    def bump(self, v):
        self.activity[v] += self.inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1)]
            heapq.heapify(self.heap)
        else:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def analyze(self, confl):
        learnt = [0]
        seen = set()
        counter = 0
        p = None
        idx = len(self.trail) - 1
        used = [confl]
        cur = len(self.trail_lim)
        c = self.clauses[confl]
        while True:
            for q in c:
                if p is not None and q == p:
                    continue
                v = abs(q)
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                self.bump(v)
                if self.level[v] == cur:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            r = self.reason[abs(p)]
            used.append(r)
            c = self.clauses[r]
        learnt[0] = -p
        back = 0
        if len(learnt) > 1:
            j = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
            learnt[1], learnt[j] = learnt[j], learnt[1]
            back = self.level[abs(learnt[1])]
        self.inc *= 1.05
        return learnt, back, used

    def backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.phase[v] = lit > 0
            self.val[v] = 0
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def pick(self):
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.val[v] == 0:
                return v
        return None

    def core_from(self, confl):
        """Input clauses the level-0 conflict depends on."""
        stack = [confl]
        visited = set()
        core = set()
        while stack:
            ci = stack.pop()
            if ci in visited:
                continue
            visited.add(ci)
            ants = self.antecedents[ci]
            if ants is None:
                core.add(ci)
            else:
                stack.extend(ants)
            for l in self.clauses[ci]:
                v = abs(l)
                if self.level[v] == 0 and self.reason[v] >= 0 and self.reason[v] != ci:
                    stack.append(self.reason[v])
        return sorted(core)

    def solve(self, conflict_limit=None):
        if self.empty_input is not None:
            return SatResult("unsat", core=[self.empty_input])
        for ci in range(self.n_input):
            c = self.clauses[ci]
            if c is not None and len(c) == 1:
                val = self.value(c[0])
                if val == -1:
                    other = self.reason[abs(c[0])]
                    core = set(self.core_from(other)) if other >= 0 else set()
                    core.add(ci)
                    return SatResult("unsat", core=sorted(core))
                if val == 0:
                    self.assign(c[0], ci)
        restart_no = 1
        budget = 100 * _luby(restart_no)
        since = 0
        while True:
            confl = self.propagate()
            if confl is not None:
                self.conflicts += 1
                since += 1
                if not self.trail_lim:
                    return SatResult("unsat", core=self.core_from(confl), conflicts=self.conflicts)
                learnt, back, used = self.analyze(confl)
                self.backtrack(back)
                li = len(self.clauses)
                self.clauses.append(learnt)
                self.antecedents.append(used)
                if len(learnt) == 1:
                    self.assign(learnt[0], li)
                else:
                    self.watches.setdefault(learnt[0], []).append(li)
                    self.watches.setdefault(learnt[1], []).append(li)
                    self.assign(learnt[0], li)
                if conflict_limit is not None and self.conflicts >= conflict_limit:
                    return SatResult("unknown", conflicts=self.conflicts)
                continue
            if since >= budget:
                since = 0
                restart_no += 1
                budget = 100 * _luby(restart_no)
                self.backtrack(0)
                continue
            v = self.pick()
            if v is None:
                model = {u: self.val[u] == 1 for u in range(1, self.n + 1)}
                return SatResult("sat", model=model, conflicts=self.conflicts)
            self.trail_lim.append(len(self.trail))
            self.assign(v if self.phase[v] else -v, -1)


def sat_solve(clauses, nvars: Optional[int] = None, conflict_limit=None) -> SatResult:
    """Decide a CNF given as lists of ints; UNSAT results carry a core of clause indices."""
    clauses = [list(c) for c in clauses]
    if nvars is None:
        nvars = max((abs(l) for c in clauses for l in c), default=0)
    return _Solver(clauses, nvars).solve(conflict_limit)


def minimize_core(clauses, core, max_size=400):
    """Deletion-based shrinking of an UNSAT core to a minimal one (when small enough)."""
    core = list(core)
    if len(core) > max_size:
        return core
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1:]
        r = sat_solve([clauses[k] for k in trial])
        if r.unsat:
            core = [trial[k] for k in r.core]
        else:
            i += 1
    return sorted(core)
