"""Finite membership structures and Tarskian evaluation.

Two evaluators share one contract:

* :func:`eval_naive` walks environments one at a time (the reference).
* :func:`eval_formula` computes, bottom-up, the boolean relation of every
  subformula over its free variables as a numpy tensor; quantifiers are
  reductions along an axis and connectives are broadcast joins.

Membership orientation: the pair ``(a, b)`` means ``a in b``.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np

from .syntax import (ATOMS, BINARY, And, App, Const, Eq, Exists, Forall, Iff, Implies, Mem,
                     Not, Or, Var, classify_uc, expand, free_vars, is_composite_free, render,
                     constants as formula_constants)


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteModel:
    size: int
    membership: frozenset = frozenset()
    constants: dict = field(default_factory=dict, hash=False, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "membership", frozenset(tuple(p) for p in self.membership))
        if self.size < 1:
            raise ValueError("model size must be at least 1")
        for a, b in self.membership:
            if not (0 <= a < self.size and 0 <= b < self.size):
                raise ValueError(f"pair {(a, b)} out of range for size {self.size}")
        for name, v in self.constants.items():
            if not 0 <= v < self.size:
                raise ValueError(f"constant {name} -> {v} out of range")

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.zeros((self.size, self.size), dtype=bool)
        for a, b in self.membership:
            m[a, b] = True
        return m

    @classmethod
    def from_matrix(cls, matrix, constants=None):
        matrix = np.asarray(matrix, dtype=bool)
        pairs = frozenset(zip(*map(lambda a: a.tolist(), np.nonzero(matrix))))
        return cls(matrix.shape[0], pairs, dict(constants or {}))

    def extension(self, b) -> frozenset:
        return frozenset(int(a) for a in np.nonzero(self.matrix[:, b])[0])

    def with_constants(self, constants) -> "FiniteModel":
        return FiniteModel(self.size, self.membership, dict(constants))

    def bitmap(self) -> int:
        """Relation bitmap with pair (0,0) as the most significant bit."""
        top = self.size * self.size - 1
        return sum(1 << (top - (a * self.size + b)) for a, b in self.membership)

    def to_json(self) -> dict:
        return {"size": self.size,
                "in": [list(p) for p in sorted(self.membership)],
                "names": {k: self.constants[k] for k in sorted(self.constants)}}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=None) + "\n"

    @classmethod
    def from_json(cls, data) -> "FiniteModel":
        return cls(int(data["size"]), frozenset(tuple(p) for p in data.get("in", [])),
                   {k: int(v) for k, v in data.get("names", {}).items()})


def load_model(path) -> FiniteModel:
    return FiniteModel.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def save_model(model: FiniteModel, path):
    Path(path).write_text(model.dumps(), encoding="utf-8")


def is_extensional(m: FiniteModel):
    """(True, None) or (False, least pair of distinct elements with equal extensions)."""
    cols = m.matrix.T
    for a in range(m.size):
        for b in range(a + 1, m.size):
            if np.array_equal(cols[a], cols[b]):
                return False, (a, b)
    return True, None


# --------------------------------------------------------------------------
# Naive reference evaluator
# --------------------------------------------------------------------------

def _value(m, t, env):
    if isinstance(t, Var):
        if t.name not in env:
            raise EvalError(f"unbound variable {t.name!r}")
        return env[t.name]
    if isinstance(t, Const):
        if t.name not in m.constants:
            raise EvalError(f"undeclared constant {t.name!r}")
        return m.constants[t.name]
    raise EvalError(f"composite term {t!r}; expand the formula first")


def eval_naive(m: FiniteModel, f, env=None, stats=None) -> bool:
    """Reference evaluator: plain recursion over environments."""
    env = dict(env or {})
    mat = m.matrix
    counter = stats if stats is not None else {}
    counter.setdefault("environments", 0)

    def ev(g, env):
        counter["environments"] += 1
        if isinstance(g, Mem):
            return bool(mat[_value(m, g.left, env), _value(m, g.right, env)])
        if isinstance(g, Eq):
            return _value(m, g.left, env) == _value(m, g.right, env)
        if isinstance(g, Not):
            return not ev(g.arg, env)
        if isinstance(g, And):
            return ev(g.left, env) and ev(g.right, env)
        if isinstance(g, Or):
            return ev(g.left, env) or ev(g.right, env)
        if isinstance(g, Implies):
            return (not ev(g.left, env)) or ev(g.right, env)
        if isinstance(g, Iff):
            return ev(g.left, env) == ev(g.right, env)
        results = (ev(g.body, {**env, g.var: a}) for a in range(m.size))
        return all(results) if isinstance(g, Forall) else any(results)

    return ev(f, env)


# --------------------------------------------------------------------------
# Relational evaluator
# --------------------------------------------------------------------------

def _const_key(name):
    return "@" + name


class Relation:
    """Boolean tensor over a sorted tuple of free names."""

    __slots__ = ("names", "data")

    def __init__(self, names, data):
        self.names = names
        self.data = data

    def aligned(self, names):
        # insert singleton axes for names this relation does not mention
        shape = [self.data.shape[self.names.index(n)] if n in self.names else 1 for n in names]
        return self.data.reshape(shape)


def _join(a: Relation, b: Relation, op):
    if a.names == b.names:
        return Relation(a.names, op(a.data, b.data))
    names = tuple(sorted(set(a.names) | set(b.names)))
    return Relation(names, op(a.aligned(names), b.aligned(names)))


class RelationalEvaluator:
    """Evaluates formulas over one model; constants not in `fixed` stay as axes.

    With ``fixed`` holding every constant and free variable the result is a
    0-dimensional relation.  Leaving constants unfixed yields the truth table
    over all constant assignments at once, which the model finder exploits.
    """

    def __init__(self, model: FiniteModel, fixed=None):
        self.model = model
        self.mat = model.matrix
        self.eye = np.eye(model.size, dtype=bool)
        self.fixed = dict(fixed or {})
        self.cells = 0

    def _term(self, t, fixed):
        if isinstance(t, Var):
            key = t.name
        elif isinstance(t, Const):
            key = _const_key(t.name)
        else:
            raise EvalError(f"composite term {t!r}; expand the formula first")
        return key, fixed.get(key)

    def _atom(self, g, base, fixed):
        (k1, v1), (k2, v2) = self._term(g.left, fixed), self._term(g.right, fixed)
        if v1 is not None and v2 is not None:
            return Relation((), np.asarray(base[v1, v2]))
        if v1 is not None:
            return Relation((k2,), base[v1, :])
        if v2 is not None:
            return Relation((k1,), base[:, v2])
        if k1 == k2:
            return Relation((k1,), np.diagonal(base).copy())
        if k1 < k2:
            return Relation((k1, k2), base)
        return Relation((k2, k1), base.T)

    def relation(self, f, fixed=None) -> Relation:
        fixed = self.fixed if fixed is None else fixed
        r = self._rel(f, fixed)
        return r

    def _rel(self, g, fixed):
        if isinstance(g, Mem):
            r = self._atom(g, self.mat, fixed)
        elif isinstance(g, Eq):
            r = self._atom(g, self.eye, fixed)
        elif isinstance(g, Not):
            a = self._rel(g.arg, fixed)
            r = Relation(a.names, ~a.data)
        elif isinstance(g, And):
            r = _join(self._rel(g.left, fixed), self._rel(g.right, fixed), np.logical_and)
        elif isinstance(g, Or):
            r = _join(self._rel(g.left, fixed), self._rel(g.right, fixed), np.logical_or)
        elif isinstance(g, Implies):
            r = _join(self._rel(g.left, fixed), self._rel(g.right, fixed),
                      lambda p, q: np.logical_or(~p, q))
        elif isinstance(g, Iff):
            r = _join(self._rel(g.left, fixed), self._rel(g.right, fixed), np.equal)
        else:
            inner_fixed = fixed
            if g.var in fixed:
                inner_fixed = dict(fixed)
                del inner_fixed[g.var]
            body = self._rel(g.body, inner_fixed)
            if g.var in body.names:
                axis = body.names.index(g.var)
                red = np.all if isinstance(g, Forall) else np.any
                r = Relation(body.names[:axis] + body.names[axis + 1:], red(body.data, axis=axis))
            else:
                r = body
        self.cells += r.data.size
        return r


def _fixed_env(m, env):
    fixed = {_const_key(k): v for k, v in m.constants.items()}
    fixed.update(env or {})
    return fixed


def eval_formula(m: FiniteModel, f, env=None, stats=None) -> bool:
    """Truth of `f` in `m` under `env` (relational evaluation)."""
    if not is_composite_free(f):
        raise EvalError("formula contains composite terms; expand it first")
    missing_c = formula_constants(f) - set(m.constants)
    if missing_c:
        raise EvalError(f"undeclared constant(s) {sorted(missing_c)}")
    missing_v = free_vars(f) - set(env or {})
    if missing_v:
        raise EvalError(f"unbound variable(s) {sorted(missing_v)}")
    ev = RelationalEvaluator(m, _fixed_env(m, env))
    r = ev.relation(f)
    if stats is not None:
        stats["cells"] = stats.get("cells", 0) + ev.cells
    return bool(r.data)


# public alias matching the operation name
evaluate = eval_formula


# --------------------------------------------------------------------------
# Theory checking and witnesses
# --------------------------------------------------------------------------

@dataclass
class EvalReport:
    values: dict            # label -> bool, "exten" first
    failing: list
    witnesses: dict         # label -> least element witnessing the outermost exists
    seconds: float
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failing

    def to_json(self) -> dict:
        return {"passed": self.passed, "values": self.values, "failing": self.failing,
                "witnesses": self.witnesses, "notes": self.notes}


def check_theory(m: FiniteModel, theory) -> EvalReport:
    """Evaluate extensionality and every axiom of `theory` in `m`."""
    missing = [c for c in theory.constants if c not in m.constants]
    if missing:
        raise EvalError(f"model does not interpret constant(s) {missing}")
    t0 = time.perf_counter()
    values, failing, witnesses, notes = {}, [], {}, []
    ok, pair = is_extensional(m)
    values["exten"] = ok
    if not ok:
        failing.append("exten")
        notes.append(f"elements {pair[0]} and {pair[1]} have equal extensions")
    for ax in theory.axioms:
        f = expand(ax.formula)
        val = eval_formula(m, f)
        values[ax.label] = val
        if not val:
            failing.append(ax.label)
        elif isinstance(f, Exists):
            fixed = _fixed_env(m, {})
            ev = RelationalEvaluator(m, fixed)
            for a in range(m.size):
                if bool(ev.relation(f.body, {**fixed, f.var: a}).data):
                    witnesses[ax.label] = a
                    break
    return EvalReport(values, failing, witnesses, time.perf_counter() - t0, notes)


class WitnessError(EvalError):
    pass


def comprehension_extension(m: FiniteModel, uc) -> frozenset:
    shape = classify_uc(uc)
    if shape is None:
        raise WitnessError("not a comprehension instance")
    body = expand(shape.body)
    extra = free_vars(body) - {shape.elem_var}
    if extra:
        raise WitnessError(f"body has free variables {sorted(extra)}")
    ev = RelationalEvaluator(m, _fixed_env(m, {}))
    r = ev.relation(body)
    if not r.names:
        return frozenset(range(m.size)) if bool(r.data) else frozenset()
    return frozenset(int(a) for a in np.nonzero(r.data)[0])


def witness(m: FiniteModel, uc) -> int:
    """The element of `m` that is the main set of the comprehension instance `uc`."""
    ok, _ = is_extensional(m)
    if not ok:
        raise WitnessError("not a model: extensionality fails")
    target = comprehension_extension(m, uc)
    hits = [b for b in range(m.size) if m.extension(b) == target]
    if not hits:
        raise WitnessError(f"no witness: no element has extension {sorted(target)}")
    return hits[0]


def describe(m: FiniteModel) -> str:
    names = {v: k for k, v in sorted(m.constants.items(), reverse=True)}
    parts = []
    for b in range(m.size):
        ext = ",".join(str(a) for a in sorted(m.extension(b)))
        tag = f"={names[b]}" if b in names else ""
        parts.append(f"{b}{tag}:{{{ext}}}")
    return " ".join(parts)
