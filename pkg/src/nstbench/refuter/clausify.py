"""Sentences to clause templates.

Pipeline per axiom: abbreviation expansion, definitional rewriting,
negation normal form, Skolemization of each existential over the universal
variables free in it, then distribution into clauses.

Definitional rewriting.  An axiom ``forall a.. exists y. (D(y) and R(y))``
where ``D(y)`` is ``forall x. (x in y <-> delta)`` introduces a function
symbol ``f`` with ``D(f(a..))``; a constant definition
``forall x. (x in C <-> delta)`` does the same with ``C``.  Elsewhere, by
extensionality, ``exists y. (D(y) and A(y))`` and ``forall y. (D(y) -> A(y))``
both reduce to ``A(f(..))`` and ``exists y. D(y)`` to true.  This collapses
the set denoted by a composite term to a single Skolem term instead of a
fresh witness per occurrence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .. import syntax as S
from ..syntax import (And, App, Const, Eq, Exists, Forall, Iff, Implies, Mem, Not, Or, Var,
                      expand, fresh_name, free_vars, substitute)
from ..theory import Axiom, TheoryFragment
from .terms import render, render_literal, term_vars

EXTENSIONALITY = S.parse("forall y. forall z. ((forall x. (x in y <-> x in z)) -> y = z)")
EXTEN_LABEL = "exten"
MAX_CLAUSES_PER_AXIOM = 20000


class ClausifyError(ValueError):
    pass


class _Truth:
    def __init__(self, value):
        self.value = value

    def __repr__(self):
        return "TOP" if self.value else "BOT"


TOP, BOT = _Truth(True), _Truth(False)


@dataclass(frozen=True)
class Clause:
    id: str                 # "label#k"
    label: str
    literals: tuple         # ((sign, (pred, s, t)), ...) with str variables
    vars: tuple

    def render(self) -> str:
        return " | ".join(render_literal(l) for l in self.literals) or "FALSE"


@dataclass(frozen=True)
class SkolemSymbol:
    name: str
    arity: int
    source: str             # axiom label
    kind: str               # "definition" | "witness"

    def to_json(self):
        return {"arity": self.arity, "source": self.source, "kind": self.kind}


@dataclass(frozen=True)
class _Entry:
    fn: str
    params: tuple
    elem: str
    delta: object
    source: str
    constant: bool


@dataclass
class ClauseSet:
    name: str
    constants: tuple
    clauses: list
    skolems: dict = field(default_factory=dict)
    definitions: dict = field(default_factory=dict)   # label -> fn for definitional sources

    def by_id(self):
        return {c.id: c for c in self.clauses}

    def function_symbols(self):
        return {s.name: s.arity for s in self.skolems.values()}


# --------------------------------------------------------------------------
# Definitional rewriting
# --------------------------------------------------------------------------

def _definition(f, y):
    """(x, delta) when f is ``forall x. (x in y <-> delta)`` with y absent from delta."""
    if not (isinstance(f, Forall) and isinstance(f.body, Iff)):
        return None
    x = f.var
    if x == y or f.body.left != Mem(Var(x), Var(y)):
        return None
    delta = f.body.right
    if y in _fv(delta):
        return None
    return x, delta


def _fv(f):
    if f is TOP or f is BOT:
        return frozenset()
    return free_vars(f)


def _match(entry, x, delta):
    """Arguments for entry.fn when delta matches entry.delta, else None."""
    sigma = {}
    if _match_f(entry.delta, delta, {entry.elem: 0}, {x: 0}, sigma, set(entry.params), [0]):
        if all(p in sigma for p in entry.params):
            return tuple(sigma[p] for p in entry.params)
    return None


def _match_f(p, t, ep, et, sigma, params, ctr):
    if p is TOP or p is BOT or t is TOP or t is BOT:
        return p is t
    if type(p) is not type(t):
        return False
    if isinstance(p, (Mem, Eq)):
        return (_match_t(p.left, t.left, ep, et, sigma, params)
                and _match_t(p.right, t.right, ep, et, sigma, params))
    if isinstance(p, Not):
        return _match_f(p.arg, t.arg, ep, et, sigma, params, ctr)
    if isinstance(p, (And, Or, Implies, Iff)):
        return (_match_f(p.left, t.left, ep, et, sigma, params, ctr)
                and _match_f(p.right, t.right, ep, et, sigma, params, ctr))
    ctr[0] += 1
    lvl = ctr[0]
    return _match_f(p.body, t.body, {**ep, p.var: lvl}, {**et, t.var: lvl}, sigma, params, ctr)


def _match_t(p, t, ep, et, sigma, params):
    if isinstance(p, Var):
        if p.name in ep:
            return isinstance(t, Var) and et.get(t.name) == ep[p.name]
        if p.name in params:
            if any(v in et for v in S.term_vars(t)):
                return False
            if p.name in sigma:
                return sigma[p.name] == t
            sigma[p.name] = t
            return True
        return isinstance(t, Var) and t.name not in et and t.name == p.name
    if isinstance(p, Const):
        return p == t
    if isinstance(p, App):
        return (isinstance(t, App) and p.fn == t.fn and len(p.args) == len(t.args)
                and all(_match_t(a, b, ep, et, sigma, params) for a, b in zip(p.args, t.args)))
    return False


def _lookup(entries, x, delta):
    for e in entries:
        args = _match(e, x, delta)
        if args is not None:
            return App(e.fn, args) if not e.constant else Const(e.fn)
    return None


def _not(a):
    if a is TOP:
        return BOT
    if a is BOT:
        return TOP
    return Not(a)


def _binary(kind, l, r):
    if kind is And:
        if l is BOT or r is BOT:
            return BOT
        if l is TOP:
            return r
        if r is TOP:
            return l
    elif kind is Or:
        if l is TOP or r is TOP:
            return TOP
        if l is BOT:
            return r
        if r is BOT:
            return l
    elif kind is Implies:
        if l is BOT or r is TOP:
            return TOP
        if l is TOP:
            return r
        if r is BOT:
            return _not(l)
    else:
        if l is TOP:
            return r
        if r is TOP:
            return l
        if l is BOT:
            return _not(r)
        if r is BOT:
            return _not(l)
    return kind(l, r)


def _subst(f, v, t):
    if f is TOP or f is BOT:
        return f
    return _resimplify(substitute(f, v, t))


def _resimplify(f):
    if isinstance(f, (Mem, Eq)) or f is TOP or f is BOT:
        return f
    if isinstance(f, Not):
        return _not(_resimplify(f.arg))
    if isinstance(f, (And, Or, Implies, Iff)):
        return _binary(type(f), _resimplify(f.left), _resimplify(f.right))
    body = _resimplify(f.body)
    if body is TOP or body is BOT or f.var not in _fv(body):
        return body
    return type(f)(f.var, body)


def _one_point(f):
    """``exists z. (z = t and A)`` and ``forall z. (z = t -> A)`` to ``A[z:=t]``."""
    z = f.var
    body = f.body
    if isinstance(f, Exists) and isinstance(body, And):
        for eq, rest in ((body.left, body.right), (body.right, body.left)):
            t = _eq_side(eq, z)
            if t is not None:
                return _subst(rest, z, t)
    elif isinstance(f, Exists):
        if _eq_side(body, z) is not None:
            return TOP
    if isinstance(f, Forall) and isinstance(body, Implies):
        t = _eq_side(body.left, z)
        if t is not None:
            return _subst(body.right, z, t)
    return None


def _eq_side(f, z):
    if not isinstance(f, Eq):
        return None
    for a, b in ((f.left, f.right), (f.right, f.left)):
        if a == Var(z) and z not in S.term_vars(b):
            return b
    return None


def rewrite(f, entries):
    """Bottom-up simplification with the definitional registry `entries`."""
    if isinstance(f, (Mem, Eq)):
        return f
    if isinstance(f, Not):
        return _neg(rewrite(f.arg, entries), entries)
    if isinstance(f, (And, Or, Implies, Iff)):
        return _binary(type(f), rewrite(f.left, entries), rewrite(f.right, entries))
    return _quant(type(f), f.var, rewrite(f.body, entries), entries)


def _neg(a, entries):
    """Negation pushed through quantifiers, so definitional shapes stay visible."""
    if a is TOP or a is BOT or isinstance(a, Not):
        return _not(a) if not isinstance(a, Not) else a.arg
    if isinstance(a, Forall):
        return _quant(Exists, a.var, _neg(a.body, entries), entries)
    if isinstance(a, Exists):
        return _quant(Forall, a.var, _neg(a.body, entries), entries)
    if isinstance(a, Implies):
        return _binary(And, a.left, _neg(a.right, entries))
    if isinstance(a, And):
        return _binary(Implies, a.left, _neg(a.right, entries))
    return Not(a)


def _quant(kind, y, body, entries):
    if body is TOP or body is BOT or y not in _fv(body):
        return body
    node = kind(y, body)
    if kind is Exists:
        d = _definition(body, y)
        if d is not None and _lookup(entries, *d) is not None:
            return TOP
        if isinstance(body, And):
            for dpart, rest in ((body.left, body.right), (body.right, body.left)):
                d = _definition(dpart, y)
                if d is not None:
                    t = _lookup(entries, *d)
                    if t is not None:
                        return _subst(rest, y, t)
    elif isinstance(body, Implies):
        d = _definition(body.left, y)
        if d is not None:
            t = _lookup(entries, *d)
            if t is not None:
                return _subst(body.right, y, t)
    out = _one_point(node)
    return node if out is None else out


@dataclass(frozen=True)
class _Source:
    kind: str                   # "const" | "exists"
    params: tuple = ()
    y: str = ""
    elem: str = ""
    delta: object = None
    rest: object = None
    fn_args: tuple = ()
    constant: str = ""


def _source(f) -> Optional[_Source]:
    params = []
    g = f
    while isinstance(g, Forall):
        params.append(g.var)
        g = g.body
    if len(set(params)) != len(params):
        return None
    if isinstance(g, Exists):
        y, X = g.var, g.body
        found = None
        d = _definition(X, y)
        if d is not None:
            found = (d, TOP)
        elif isinstance(X, And):
            for dpart, rest in ((X.left, X.right), (X.right, X.left)):
                d = _definition(dpart, y)
                if d is not None:
                    found = (d, rest)
                    break
        if found is None:
            return None
        (x, delta), rest = found
        dv = _fv(delta) - {x}
        if not dv <= set(params) or not _fv(rest) <= set(params) | {y}:
            return None
        fn_args = tuple(p for p in params if p in dv)
        return _Source("exists", tuple(params), y, x, delta, rest, fn_args)
    if isinstance(f, Forall) and isinstance(f.body, Iff):
        g = f
        x = g.var
        head = g.body.left
        if isinstance(head, Mem) and head.left == Var(x) and isinstance(head.right, Const):
            delta = g.body.right
            if _fv(delta) <= {x}:
                return _Source("const", (), "", x, delta, TOP, (), head.right.name)
    return None


def _registry(theory, fnames):
    """Fixpoint of definitional sources: label -> _Entry."""
    entries = {}
    order = {a.label: i for i, a in enumerate(theory.axioms)}

    def ranked(skip):
        es = [e for l, e in entries.items() if l != skip]
        return sorted(es, key=lambda e: (not e.constant, order[e.source]))

    expanded = {a.label: expand(a.formula) for a in theory.axioms}
    for _ in range(12):
        changed = False
        for phase in ("const", "exists"):
            for a in theory.axioms:
                others = ranked(a.label)
                g = rewrite(expanded[a.label], others)
                src = _source(g) if g is not TOP and g is not BOT else None
                if src is None or src.kind != phase:
                    if a.label in entries and (src is None or entries[a.label].constant != (phase == "const")):
                        if src is None:
                            del entries[a.label]
                            changed = True
                    continue
                new = None
                if phase == "const":
                    new = _Entry(src.constant, (), src.elem, src.delta, a.label, True)
                elif _lookup(others, src.elem, src.delta) is None:
                    new = _Entry(fnames[a.label], src.fn_args, src.elem, src.delta, a.label, False)
                if new is None:
                    if a.label in entries:
                        del entries[a.label]
                        changed = True
                elif entries.get(a.label) != new:
                    entries[a.label] = new
                    changed = True
        if not changed:
            return entries, ranked
    raise ClausifyError("definitional registry did not stabilise")


# --------------------------------------------------------------------------
# NNF, Skolemization, CNF
# --------------------------------------------------------------------------

def _nnf(f, pos=True):
    if f is TOP or f is BOT:
        return f if pos else _not(f)
    if isinstance(f, (Mem, Eq)):
        return ("lit", pos, f)
    if isinstance(f, Not):
        return _nnf(f.arg, not pos)
    if isinstance(f, And):
        return ("and" if pos else "or", [_nnf(f.left, pos), _nnf(f.right, pos)])
    if isinstance(f, Or):
        return ("or" if pos else "and", [_nnf(f.left, pos), _nnf(f.right, pos)])
    if isinstance(f, Implies):
        if pos:
            return ("or", [_nnf(f.left, False), _nnf(f.right, True)])
        return ("and", [_nnf(f.left, True), _nnf(f.right, False)])
    if isinstance(f, Iff):
        a, b = f.left, f.right
        if pos:
            return ("and", [("or", [_nnf(a, False), _nnf(b, True)]),
                            ("or", [_nnf(a, True), _nnf(b, False)])])
        return ("or", [("and", [_nnf(a, True), _nnf(b, False)]),
                       ("and", [_nnf(a, False), _nnf(b, True)])])
    q = "all" if (isinstance(f, Forall) == pos) else "ex"
    return (q, f.var, _nnf(f.body, pos))


def _nnf_fv(n):
    if n is TOP or n is BOT:
        return set()
    tag = n[0]
    if tag == "lit":
        return S.term_vars(n[2].left) | S.term_vars(n[2].right)
    if tag in ("and", "or"):
        return set().union(*(_nnf_fv(c) for c in n[1]))
    return _nnf_fv(n[2]) - {n[1]}


class _Skolemizer:
    def __init__(self, label, used_fns, skolems):
        self.label = label
        self.used_fns = used_fns
        self.skolems = skolems
        self.vars_used = set()
        self.count = 0

    def term(self, t, env):
        if isinstance(t, Var):
            if t.name not in env:
                raise ClausifyError(f"{self.label}: free variable {t.name}")
            return env[t.name]
        if isinstance(t, Const):
            return (t.name,)
        if isinstance(t, App):
            return (t.fn,) + tuple(self.term(a, env) for a in t.args)
        raise ClausifyError(f"{self.label}: composite term survived expansion")

    def run(self, n, univ, env):
        if n is TOP or n is BOT:
            return n
        tag = n[0]
        if tag == "lit":
            f = n[2]
            pred = "in" if isinstance(f, Mem) else "="
            return ("lit", n[1], (pred, self.term(f.left, env), self.term(f.right, env)))
        if tag in ("and", "or"):
            return (tag, [self.run(c, univ, env) for c in n[1]])
        if tag == "all":
            cv = fresh_name(n[1], self.vars_used)
            self.vars_used.add(cv)
            return self.run(n[2], univ + [cv], {**env, n[1]: cv})
        # existential: Skolem over the universals actually free here
        free_cvs = set()
        for v in _nnf_fv(n) & set(env):
            free_cvs.update(term_vars(env[v]))
        args = tuple(u for u in univ if u in free_cvs)
        self.count += 1
        fn = fresh_name(f"{self.label}_{self.count}", self.used_fns)
        self.used_fns.add(fn)
        self.skolems[fn] = SkolemSymbol(fn, len(args), self.label, "witness")
        return self.run(n[2], univ, {**env, n[1]: (fn,) + args})


def _cnf(n):
    if n is TOP:
        return []
    if n is BOT:
        return [[]]
    tag = n[0]
    if tag == "lit":
        return [[(n[1], n[2])]]
    if tag == "and":
        out = []
        for c in n[1]:
            out.extend(_cnf(c))
            if len(out) > MAX_CLAUSES_PER_AXIOM:
                raise ClausifyError("clause set too large")
        return out
    acc = [[]]
    for c in n[1]:
        cs = _cnf(c)
        if len(acc) * len(cs) > MAX_CLAUSES_PER_AXIOM:
            raise ClausifyError("clause set too large")
        acc = [a + b for a in acc for b in cs]
    return acc


def _tidy(lits):
    out = []
    for l in lits:
        if l not in out:
            out.append(l)
    for sign, atom in out:
        if (not sign, atom) in out:
            return None
    return tuple(out)


def _clause_vars(lits):
    seen = []
    for _, (_, s, t) in lits:
        for v in term_vars(s) + term_vars(t):
            if v not in seen:
                seen.append(v)
    return tuple(seen)


def _templates(label, formula, used_fns, skolems):
    sk = _Skolemizer(label, used_fns, skolems)
    body = sk.run(_nnf(formula), [], {})
    out, seen = [], set()
    for lits in _cnf(body):
        t = _tidy(lits)
        if t is None or t in seen:
            continue
        seen.add(t)
        out.append(Clause(f"{label}#{len(out) + 1}", label, t, _clause_vars(t)))
    return out


def clausify(theory: TheoryFragment, extensionality: bool = True) -> ClauseSet:
    """Clause templates for `theory`; deterministic for a given fragment."""
    if extensionality and EXTEN_LABEL in theory.labels:
        raise ClausifyError(f"label {EXTEN_LABEL!r} is reserved")
    used = set(theory.constants)
    fnames = {}
    for a in theory.axioms:
        fnames[a.label] = fresh_name(a.main or a.label, used)
        used.add(fnames[a.label])
    entries, ranked = _registry(theory, fnames)
    skolems = {}
    definitions = {}
    for label, e in entries.items():
        if not e.constant:
            skolems[e.fn] = SkolemSymbol(e.fn, len(e.params), label, "definition")
        definitions[label] = e.fn
    used_fns = set(used) | set(skolems)
    clauses = []
    for a in theory.axioms:
        others = ranked(a.label)
        g = rewrite(expand(a.formula), others)
        if a.label in entries and not entries[a.label].constant:
            src = _source(g)
            term = App(entries[a.label].fn, tuple(Var(p) for p in src.fn_args))
            d = Forall(src.elem, Iff(Mem(Var(src.elem), Var(src.y)), src.delta))
            body = _binary(And, d, src.rest)
            g = _subst(body, src.y, term)
            for p in reversed(src.params):
                if g is not TOP and g is not BOT and p in _fv(g):
                    g = Forall(p, g)
        clauses.extend(_templates(a.label, g, used_fns, skolems))
    if extensionality:
        clauses.extend(_templates(EXTEN_LABEL, EXTENSIONALITY, used_fns, skolems))
    return ClauseSet(theory.name, tuple(theory.constants), clauses, skolems, definitions)


def clausify_sentence(f, label="phi", constants=()) -> list:
    """Clause templates of a single sentence, without extensionality."""
    theory = TheoryFragment("sentence", tuple(constants), (Axiom(label, f, "axiom"),))
    return clausify(theory, extensionality=False).clauses

