import random

import pyparsing as pp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nstbench import resources
from nstbench.finder import enumerate_models
from nstbench.semantics import FiniteModel, eval_naive
from nstbench.syntax import (And, Const, Eq, Exists, Extr, Forall, Iff, Implies, Mem, Not, OPair, Or,
                             ParseError, UcShape, UPair, Var, all_vars, alpha_equivalent,
                             classify_uc, expand, expand_once, free_vars, is_composite_free, parse,
                             render, substitute, term_vars)
from strategies import CONSTS, VARS, formulas, terms

x, y, z = Var("x"), Var("y"), Var("z")
RUSSELL = Exists("y", Forall("x", Iff(Mem(x, y), Not(Mem(x, x)))))


# --------------------------------------------------------------------------
# Examples
# --------------------------------------------------------------------------

def test_parse_examples():
    assert parse("forall x. x = x") == Forall("x", Eq(x, x))
    assert parse("exists y. forall x. (x in y <-> not x in x)") == RUSSELL
    f = parse("x in y -> y in x <-> z = z")
    assert f == Iff(Implies(Mem(x, y), Mem(y, x)), Eq(z, z))


def test_render_examples():
    assert render(Forall("x", Eq(x, x))) == "forall x. x = x"
    assert render(RUSSELL) == "exists y. forall x. (x in y <-> not x in x)"


def test_sugar():
    assert parse("x notin y") == Not(Mem(x, y))
    assert parse("x != y") == Not(Eq(x, y))
    assert parse("a sub b") == Forall("z", Implies(Mem(z, Var("a")), Mem(z, Var("b"))))
    # the bound variable avoids the operands
    assert parse("z sub b") == Forall("z0", Implies(Mem(Var("z0"), z), Mem(Var("z0"), Var("b"))))


def test_constants_are_declared():
    assert parse("x in R", constants=["R"]) == Mem(x, Const("R"))
    assert parse("x in R") == Mem(x, Var("R"))
    with pytest.raises(ParseError):
        parse("forall R. x in R", constants=["R"])


def test_identifier_characters():
    f = parse("H+ in H- -> x' = w-1", constants=["H+", "H-"])
    assert f == Implies(Mem(Const("H+"), Const("H-")), Eq(Var("x'"), Var("w-1")))
    assert parse("a- = a-->b = b") == Implies(Eq(Var("a-"), Var("a-")), Eq(Var("b"), Var("b")))


def test_parse_error_location():
    with pytest.raises(ParseError) as e:
        parse("forall x.\n  x in and y")
    assert (e.value.line, e.value.column) == (2, 8)
    assert "identifier" in e.value.expected
    assert str(e.value).startswith("2:8:")
    with pytest.raises(ParseError) as e:
        parse("x in y )")
    assert e.value.column == 8
    with pytest.raises(ParseError) as e:
        parse("x # y")
    assert e.value.column == 3


def test_free_vars_examples():
    assert free_vars(parse("forall x. x in y")) == {"y"}
    assert free_vars(RUSSELL) == set()
    body = parse("x in x or x = y")
    assert "y" in free_vars(body)
    assert "y" in free_vars(Forall("x", Iff(Mem(x, y), body)))


def test_substitute_examples():
    assert substitute(parse("x in y"), "y", Const("c")) == Mem(x, Const("c"))
    assert render(substitute(parse("forall x. x in y"), "y", x)) == "forall x0. x0 in x"
    f = parse("forall x. x in z")
    assert substitute(f, "y", x) == f


def test_expand_examples():
    f = parse("c in upair(a,b)", constants=["c"])
    assert render(expand(f)) == "exists y. ((forall x. (x in y <-> (x = a or x = b))) and c in y)"
    g = expand_once(parse("w = extr(v)"))
    assert render(g) == ("exists y. ((forall x. (x in y <-> exists z. (z = opair(v,x) and z in v)))"
                         " and w = y)")
    h = parse("forall x. x in y")
    assert expand(h) is h


def test_expand_opair_goes_through_upairs():
    e = expand_once(parse("w = opair(a,b)"))
    assert render(e) == ("exists y. ((forall x. (x in y <-> (x = upair(a,a) or x = upair(a,b))))"
                         " and w = y)")
    assert is_composite_free(expand(parse("w = opair(a,b)")))


def test_expand_avoids_capture():
    f = parse("forall y. x in upair(y,x)")
    e = expand(f)
    assert is_composite_free(e)
    # the inner definition still refers to the bound y and the free x
    assert free_vars(e) == {"x"}
    inner = e.body
    assert isinstance(inner, Exists) and inner.var not in ("x", "y")


def test_classify_examples():
    shape = classify_uc(RUSSELL)
    assert shape == UcShape("y", "x", Not(Mem(x, x)), False)
    assert classify_uc(parse("forall x. x in x")) is None
    d = parse("forall x. (x in D <-> (x in x and x = D))", constants=["D"])
    assert classify_uc(d) is None
    fp = classify_uc(parse("exists y. forall x. (x in y <-> x in x or x = y)"))
    assert fp.self_referential


# --------------------------------------------------------------------------
# Properties
# --------------------------------------------------------------------------

@settings(max_examples=1000)
@given(formulas(max_depth=5))
def test_round_trip(f):
    assert parse(render(f), constants=CONSTS) == f


@given(formulas(max_depth=4))
def test_expand_idempotent(f):
    e = expand(f)
    assert is_composite_free(e)
    assert expand(e) == e
    assert free_vars(e) == free_vars(f)


@given(formulas(max_depth=3), st.sampled_from(VARS), st.sampled_from(VARS))
def test_classify_reconstruct(body, main, elem):
    shape = UcShape(main, elem, body, main in free_vars(body))
    if main == elem:
        return
    assert classify_uc(shape.reconstruct()) == shape


# Reference substitution: rename every binder to a globally fresh name, then
# replace naively.
def _rename_all(f, env, counter):
    def term(t):
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        if isinstance(t, UPair):
            return UPair(term(t.left), term(t.right))
        if isinstance(t, OPair):
            return OPair(term(t.left), term(t.right))
        if isinstance(t, Extr):
            return Extr(term(t.arg))
        return t
    if isinstance(f, (Mem, Eq)):
        return type(f)(term(f.left), term(f.right))
    if isinstance(f, Not):
        return Not(_rename_all(f.arg, env, counter))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_rename_all(f.left, env, counter), _rename_all(f.right, env, counter))
    counter[0] += 1
    new = f"#b{counter[0]}"
    return type(f)(new, _rename_all(f.body, {**env, f.var: new}, counter))


def _naive_subst(f, v, t):
    def term(s):
        if isinstance(s, Var):
            return t if s.name == v else s
        if isinstance(s, UPair):
            return UPair(term(s.left), term(s.right))
        if isinstance(s, OPair):
            return OPair(term(s.left), term(s.right))
        if isinstance(s, Extr):
            return Extr(term(s.arg))
        return s
    if isinstance(f, (Mem, Eq)):
        return type(f)(term(f.left), term(f.right))
    if isinstance(f, Not):
        return Not(_naive_subst(f.arg, v, t))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(_naive_subst(f.left, v, t), _naive_subst(f.right, v, t))
    return type(f)(f.var, _naive_subst(f.body, v, t))


def reference_substitute(f, v, t):
    return _naive_subst(_rename_all(f, {}, [0]), v, t)


@settings(max_examples=500)
@given(formulas(max_depth=5, composites=False), st.sampled_from(VARS), terms(composites=False))
def test_substitute_matches_reference(f, v, t):
    got = substitute(f, v, t)
    assert alpha_equivalent(got, reference_substitute(f, v, t))
    assert free_vars(got) == (free_vars(f) - {v}) | (term_vars(t) if v in free_vars(f) else set())
    if v not in free_vars(f):
        assert got == f


def test_substitute_fresh_names_are_numbered():
    f = parse("forall x. exists x0. x in y and x0 in y")
    got = substitute(f, "y", x)
    assert render(got) == "forall x1. exists x0. (x1 in x and x0 in x)"


SMALL = [FiniteModel(n, frozenset((a, b) for a in range(n) for b in range(n) if (bits >> (a * n + b)) & 1))
         for n in (1, 2) for bits in range(1 << (n * n))]


@settings(max_examples=300)
@given(formulas(max_depth=4, composites=False, constants=False, variables=["x", "y", "z", "w"]),
       st.sampled_from(["x", "y", "z"]), st.sampled_from(["x", "y", "z", "w"]),
       st.integers(0, len(SMALL) - 1), st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_substitution_lemma(f, v, u, mi, values):
    """M, env |= f[v:=u]  iff  M, env[v := env(u)] |= f."""
    m = SMALL[mi]
    env = {name: values[i] % m.size for i, name in enumerate(["x", "y", "z", "w"])}
    lhs = eval_naive(m, substitute(f, v, Var(u)), env)
    rhs = eval_naive(m, f, {**env, v: env[u]})
    assert lhs == rhs


# --------------------------------------------------------------------------
# Expansion preserves truth where the composites denote
# --------------------------------------------------------------------------

def _denote(m, t, env):
    """Element denoted by a composite term, or None when the set does not exist."""
    ext = [frozenset(a for a in range(m.size) if (a, b) in m.membership) for b in range(m.size)]

    def find(s):
        for b in range(m.size):
            if ext[b] == s:
                return b
        return None

    def upair(a, b):
        return None if a is None or b is None else find(frozenset({a, b}))

    def go(t):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, UPair):
            return upair(go(t.left), go(t.right))
        if isinstance(t, OPair):
            a, b = go(t.left), go(t.right)
            return upair(upair(a, a), upair(a, b))
        if isinstance(t, Extr):
            a = go(t.arg)
            if a is None:
                return None
            xs = set()
            for xv in range(m.size):
                p = upair(upair(a, a), upair(a, xv))
                if p is not None and p in ext[a]:
                    xs.add(xv)
            return find(frozenset(xs))
        raise TypeError(t)
    return go(t)


class _Undefined(Exception):
    pass


def _eval_sugar(m, f, env):
    if isinstance(f, (Mem, Eq)):
        a, b = _denote(m, f.left, env), _denote(m, f.right, env)
        if a is None or b is None:
            raise _Undefined
        return (a, b) in m.membership if isinstance(f, Mem) else a == b
    if isinstance(f, Not):
        return not _eval_sugar(m, f.arg, env)
    if isinstance(f, (And, Or, Implies, Iff)):
        l, r = _eval_sugar(m, f.left, env), _eval_sugar(m, f.right, env)
        return {And: l and r, Or: l or r, Implies: (not l) or r, Iff: l == r}[type(f)]
    vals = [_eval_sugar(m, f.body, {**env, f.var: e}) for e in range(m.size)]
    return all(vals) if isinstance(f, Forall) else any(vals)


def _pair_closed(m):
    ext = {frozenset(a for a in range(m.size) if (a, b) in m.membership) for b in range(m.size)}
    return all(frozenset({a, b}) in ext for a in range(m.size) for b in range(m.size))


# Composites denote only where the finite model happens to contain the set;
# other cases are skipped.  The Mirimanoff fixture contains {0}, {0,1}, {1}.
DENOTING = ([m for n in (1, 2, 3) for m in enumerate_models(n, canonical_only=True)]
            + [resources.model("mirimanoff")])


def test_some_models_are_pair_closed():
    assert any(_pair_closed(m) for m in DENOTING)


@settings(max_examples=300)
@given(formulas(max_depth=3, constants=False, variables=["x", "y", "a"]),
       st.integers(0, 10 ** 6), st.lists(st.integers(0, 10), min_size=3, max_size=3))
def test_expand_preserves_truth(f, mi, values):
    m = DENOTING[mi % len(DENOTING)]
    env = {v: values[i] % m.size for i, v in enumerate(["x", "y", "a"])}
    try:
        expected = _eval_sugar(m, f, env)
    except _Undefined:
        return
    assert eval_naive(m, expand(f), env) == expected


# --------------------------------------------------------------------------
# Reference grammar oracle
# --------------------------------------------------------------------------

_KW = {"forall", "exists", "not", "and", "or", "in", "notin", "sub", "upair", "opair", "extr"}


def oracle_parser(constants):
    idc = pp.alphanums + "_+-'"

    def kw(w):
        return pp.Keyword(w, ident_chars=idc)

    def s(w):
        return kw(w).suppress()

    ident = pp.Regex(r"[A-Za-z_](?:[A-Za-z0-9_+']|-(?!>))*").add_condition(lambda t: t[0] not in _KW)
    lp, rp, comma, dot = map(pp.Suppress, "(),.")
    term = pp.Forward()
    term <<= ((s("upair") + lp + term + comma + term + rp).set_parse_action(lambda t: UPair(t[0], t[1]))
              | (s("opair") + lp + term + comma + term + rp).set_parse_action(lambda t: OPair(t[0], t[1]))
              | (s("extr") + lp + term + rp).set_parse_action(lambda t: Extr(t[0]))
              | ident.copy().set_parse_action(lambda t: Const(t[0]) if t[0] in constants else Var(t[0])))
    rel = pp.Literal("!=") | pp.Literal("=") | kw("notin") | kw("in")
    build = {"in": Mem, "=": Eq,
             "notin": lambda a, b: Not(Mem(a, b)), "!=": lambda a, b: Not(Eq(a, b))}
    atom = (term + rel + term).set_parse_action(lambda t: build[t[1]](t[0], t[2]))

    formula = pp.Forward()
    quant = ((kw("forall") | kw("exists")) + ident + dot + formula).set_parse_action(
        lambda t: (Forall if t[0] == "forall" else Exists)(t[1], t[2]))
    unary = pp.Forward()
    unary <<= ((s("not") + (quant | unary)).set_parse_action(lambda t: Not(t[0]))
               | (lp + formula + rp)
               | atom)

    def fold(cls):
        def act(t):
            out = t[0]
            for nxt in t[1:]:
                out = cls(out, nxt)
            return out
        return act

    conj = (unary + pp.ZeroOrMore(s("and") + (quant | unary))).set_parse_action(fold(And))
    disj = (conj + pp.ZeroOrMore(s("or") + (quant | conj))).set_parse_action(fold(Or))
    imp = pp.Forward()
    imp <<= (disj + pp.Optional(pp.Suppress("->") + (quant | imp))).set_parse_action(
        lambda t: Implies(t[0], t[1]) if len(t) == 2 else t[0])
    iff = pp.Forward()
    iff <<= (imp + pp.Optional(pp.Suppress("<->") + (quant | iff))).set_parse_action(
        lambda t: Iff(t[0], t[1]) if len(t) == 2 else t[0])
    formula <<= quant | iff
    return formula


def random_text(rng, d):
    """Random surface string built without reference to operator precedence."""
    def term(k):
        r = rng.random()
        if k <= 0 or r < 0.6:
            return rng.choice(VARS + CONSTS)
        if r < 0.75:
            return f"upair({term(k - 1)},{term(k - 1)})"
        if r < 0.9:
            return f"opair({term(k - 1)}, {term(k - 1)})"
        return f"extr({term(k - 1)})"

    if d <= 0 or rng.random() < 0.2:
        return f"{term(2)} {rng.choice(['in', 'notin', '=', '!='])} {term(2)}"
    r = rng.random()
    if r < 0.15:
        return "not " + random_text(rng, d - 1)
    if r < 0.3:
        return f"{rng.choice(['forall', 'exists'])} {rng.choice(VARS)}. {random_text(rng, d - 1)}"
    if r < 0.4:
        return "(" + random_text(rng, d - 1) + ")"
    op = rng.choice(["and", "or", "->", "<->"])
    return f"{random_text(rng, d - 1)} {op} {random_text(rng, d - 1)}"


@pytest.mark.parametrize("seed", range(5))
def test_parser_matches_reference_grammar(seed):
    rng = random.Random(seed)
    oracle = oracle_parser(set(CONSTS))
    for _ in range(40):
        text = random_text(rng, 6)
        expected = oracle.parse_string(text, parse_all=True)[0]
        assert parse(text, constants=CONSTS) == expected, text


def test_reference_grammar_precedence_example():
    oracle = oracle_parser(set())
    text = "x in y -> y in x <-> z = z"
    assert oracle.parse_string(text, parse_all=True)[0] == parse(text)
    text = "a = a and forall x. x = x or y = y"
    assert oracle.parse_string(text, parse_all=True)[0] == parse(text)
