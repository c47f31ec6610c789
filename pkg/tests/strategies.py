"""Hypothesis strategies for terms, formulas and small models."""

from hypothesis import strategies as st

from nstbench.semantics import FiniteModel
from nstbench.syntax import (And, Const, Eq, Exists, Extr, Forall, Iff, Implies, Mem, Not, OPair, Or,
                             UPair, Var)

VARS = ["x", "y", "z", "a", "b'", "v+", "w-1"]
CONSTS = ["R", "H+", "H-", "C'"]
BINARY = [And, Or, Implies, Iff]


def terms(composites=True, constants=True):
    base = st.sampled_from(VARS).map(Var)
    if constants:
        base = base | st.sampled_from(CONSTS).map(Const)
    if not composites:
        return base
    return st.recursive(
        base,
        lambda t: st.builds(UPair, t, t) | st.builds(OPair, t, t) | st.builds(Extr, t),
        max_leaves=4)


def formulas(max_depth=4, composites=True, constants=True, variables=VARS):
    t = terms(composites, constants) if variables is VARS else st.sampled_from(variables).map(Var)
    atom = st.builds(Mem, t, t) | st.builds(Eq, t, t)

    def build(depth):
        if depth <= 1:
            return atom
        sub = build(depth - 1)
        var = st.sampled_from(variables)
        return st.one_of(
            atom,
            st.builds(Not, sub),
            st.builds(lambda op, l, r: op(l, r), st.sampled_from(BINARY), sub, sub),
            st.builds(Forall, var, sub),
            st.builds(Exists, var, sub),
        )
    return build(max_depth)


@st.composite
def models(draw, max_size=3, names=()):
    n = draw(st.integers(1, max_size))
    pairs = draw(st.frozensets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))
    consts = {c: draw(st.integers(0, n - 1)) for c in names}
    return FiniteModel(n, pairs, consts)


def random_formula(rng, d, variables=("x", "y", "z"), consts=(), exact=True):
    """Random composite-free formula of depth exactly `d` (at most `d` if not exact)."""
    pool = [Var(v) for v in variables] + [Const(c) for c in consts]
    if d == 0 or (not exact and rng.random() < 0.25):
        cls = rng.choice([Mem, Eq])
        return cls(rng.choice(pool), rng.choice(pool))
    r = rng.random()
    if r < 0.15:
        return Not(random_formula(rng, d - 1, variables, consts, exact))
    if r < 0.55:
        return rng.choice([Forall, Exists])(rng.choice(variables),
                                            random_formula(rng, d - 1, variables, consts, exact))
    a = random_formula(rng, d - 1, variables, consts, exact)
    b = random_formula(rng, rng.randrange(d), variables, consts, False)
    if rng.random() < 0.5:
        a, b = b, a
    return rng.choice(BINARY)(a, b)
