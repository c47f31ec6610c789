"""Ground instances and the equality axioms they need.

Equality is handled propositionally: equalities are oriented (symmetry),
``t = t`` is simplified away (reflexivity), and transitivity and
congruence clauses are added only among terms the ground problem can
possibly equate, i.e. terms in the same component of the graph whose edges
are the equality atoms present.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .terms import instantiate, key, orient, render, render_atom, render_literal


@dataclass(frozen=True)
class GroundClause:
    literals: tuple             # ((sign, atom), ...) after simplification
    origin: str                 # "label#k" or "eq:trans" / "eq:cong-in" / "eq:cong-fn"
    subst: tuple = ()           # ((var, term), ...) for template instances
    terms: tuple = ()           # equality-axiom arguments (terms or atoms)

    def render(self) -> str:
        return " | ".join(render_literal(l) for l in self.literals) or "FALSE"


def simplify(lits):
    """Drop ``t != t`` literals; None when the clause is valid."""
    out = []
    for sign, atom in lits:
        atom = orient(atom)
        if atom[0] == "=" and atom[1] == atom[2]:
            if sign:
                return None
            continue
        lit = (sign, atom)
        if (not sign, atom) in out:
            return None
        if lit not in out:
            out.append(lit)
    return tuple(out)


def instance(clause, subst: dict):
    lits = [(s, (a[0], instantiate(a[1], subst), instantiate(a[2], subst))) for s, a in clause.literals]
    return simplify(lits)


class UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if key(ra) < key(rb):
            ra, rb = rb, ra
        self.parent[ra] = rb
        return True


def trans_clause(a, b, c):
    return simplify([(False, ("=", a, b)), (False, ("=", b, c)), (True, ("=", a, c))])


def cong_in_clause(m1, m2):
    (_, s1, t1), (_, s2, t2) = m1, m2
    return simplify([(False, ("=", s1, s2)), (False, ("=", t1, t2)), (False, m1), (True, m2)])


def cong_fn_clause(s, t):
    lits = [(False, ("=", a, b)) for a, b in zip(s[1:], t[1:])]
    lits.append((True, ("=", s, t)))
    return simplify(lits)


def equality_clauses(clauses, limit=None):
    """Equality axioms for a list of GroundClause, restricted to connected terms."""
    atoms = set()
    for c in clauses:
        for _, a in c.literals:
            atoms.add(a)
    uf = UnionFind()
    terms = set()
    for a in atoms:
        for t in (a[1], a[2]):
            stack = [t]
            while stack:
                u = stack.pop()
                if u in terms:
                    continue
                terms.add(u)
                uf.find(u)
                stack.extend(u[1:])
        if a[0] == "=":
            uf.union(a[1], a[2])
    out = []
    # function congruence, to a fixpoint of component merges
    groups = {}
    for t in terms:
        if len(t) > 1:
            groups.setdefault((t[0], len(t)), []).append(t)
    for g in groups.values():
        g.sort(key=key)
    # terms with equal signatures (symbol, argument components) are congruent
    changed = True
    while changed:
        changed = False
        for g in groups.values():
            rep = {}
            for t in g:
                r = rep.setdefault(tuple(uf.find(a) for a in t[1:]), t)
                if uf.union(r, t):
                    changed = True
    fn_buckets = []
    for gk in sorted(groups):
        buckets = {}
        for t in groups[gk]:
            buckets.setdefault(tuple(uf.find(a) for a in t[1:]), []).append(t)
        fn_buckets.extend(buckets.values())
    if limit is not None and sum(len(b) * (len(b) - 1) // 2 for b in fn_buckets) > limit:
        return None
    for b in fn_buckets:
        for s, t in itertools.combinations(b, 2):
            cl = cong_fn_clause(s, t)
            if cl is not None:
                out.append(GroundClause(cl, "eq:cong-fn", terms=(s, t)))
    # membership congruence within (component of element, component of set)
    mems = sorted((a for a in atoms if a[0] == "in"), key=render_atom)
    buckets = {}
    for m in mems:
        buckets.setdefault((uf.find(m[1]), uf.find(m[2])), []).append(m)
    if limit is not None and len(out) + sum(len(b) * (len(b) - 1) for b in buckets.values()) > limit:
        return None
    for b in buckets.values():
        for m1, m2 in itertools.permutations(b, 2):
            cl = cong_in_clause(m1, m2)
            if cl is not None:
                out.append(GroundClause(cl, "eq:cong-in", terms=(m1, m2)))
    # transitivity within components
    comps = {}
    for t in sorted(terms, key=key):
        comps.setdefault(uf.find(t), []).append(t)
    if limit is not None and len(out) + sum(n * (n - 1) * (n - 2) // 2 for n in map(len, comps.values())) > limit:
        return None
    for members in comps.values():
        if len(members) < 3:
            continue
        for a, c in itertools.combinations(members, 2):
            for b in members:
                if b == a or b == c:
                    continue
                cl = trans_clause(a, b, c)
                if cl is not None:
                    out.append(GroundClause(cl, "eq:trans", terms=(a, b, c)))
    return out


@dataclass
class GroundProblem:
    clauses: list = field(default_factory=list)
    seen: dict = field(default_factory=dict)

    def add(self, gc: GroundClause) -> bool:
        k = frozenset(gc.literals)
        if k in self.seen:
            return False
        self.seen[k] = len(self.clauses)
        self.clauses.append(gc)
        return True

    def encode(self, extra=()):
        """DIMACS encoding of clauses + extra; returns (cnf, atom table, all clauses)."""
        table = {}
        cnf = []
        allc = list(self.clauses) + [c for c in extra if frozenset(c.literals) not in self.seen]
        for gc in allc:
            row = []
            for sign, atom in gc.literals:
                v = table.get(atom)
                if v is None:
                    v = table[atom] = len(table) + 1
                row.append(v if sign else -v)
            cnf.append(row)
        return cnf, table, allc


def term_pool(depth_limit, constants, functions):
    """Ground terms of depth <= depth_limit in (depth, rendering) order."""
    level = sorted({(c,) for c in constants}, key=key)
    pool = list(level)
    for _ in range(2, depth_limit + 1):
        last = set(level)
        new = []
        for fn, k in sorted(functions.items()):
            if k == 0:
                continue
            for args in itertools.product(pool, repeat=k):
                if any(a in last for a in args):
                    new.append((fn,) + args)
        new.sort(key=key)
        level = new
        pool.extend(new)
    return pool
