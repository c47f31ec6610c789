"""Named comprehension instances and the constructions built from them.

Every builder returns a :class:`TheoryFragment` whose axioms are sentences
in the sugared surface language (``upair``/``opair``/``extr`` allowed);
callers that need pure first-order form run :func:`syntax.expand`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (And, Const, Eq, Exists, Extr, Forall, Iff, Implies, Mem, Not, OPair, Var, all_vars,
                     classify_uc, conj, disj, free_vars, fresh_name, parse, render, subst_many,
                     substitute, uc_instance)
from .theory import Axiom, TheoryFragment, TheoryError, make_axiom, parse_nst


class CatalogError(ValueError):
    pass


def _uc(label, text, main=None, constants=()):
    f = parse(text, constants)
    return Axiom(label, f, "uc", main)


# --------------------------------------------------------------------------
# Basic comprehension instances
# --------------------------------------------------------------------------

RUSSELL = "exists y. forall x. (x in y <-> x notin x)"
CO_RUSSELL = "exists y. forall x. (x in y <-> x in x)"
UNIVERSAL = "exists y. forall x. (x in y <-> x = x)"
EMPTY = "exists y. forall x. (x in y <-> x != x)"
PAIR = "forall a. forall b. exists y. forall x. (x in y <-> x = a or x = b)"
EXTRACT = "forall a. exists y. forall x. (x in y <-> exists z. (z = opair(a,x) and z in a))"

# the co-Russell set contains itself
CORUSSELL_SELF = "forall y. ((forall x. (x in y <-> x in x)) -> y in y)"
NO_UNIVERSAL = "not exists y. forall x. (x in y <-> x = x)"


def universal_exists():
    return parse(UNIVERSAL)


def single(name, label, text, main=None):
    return TheoryFragment(name, (), (_uc(label, text, main),))


def russell():
    return single("russell", "russell", RUSSELL, "R")


def co_russell():
    return single("co_russell", "co_russell", CO_RUSSELL, "K")


def universal():
    return single("universal", "universal", UNIVERSAL, "U")


def empty():
    return single("empty", "empty", EMPTY, "E")


def curry(phi):
    """The Curry-like set {x : x in x -> phi} for a sentence phi."""
    phi = _sentence(phi)
    body = Implies(Mem(Var("x"), Var("x")), phi)
    return TheoryFragment("curry", (), (Axiom("curry", uc_instance(body), "uc", "C"),))


def pair():
    return TheoryFragment("pair", (), (Axiom("pair", parse(PAIR), "axiom", "p"),))


def extract():
    return TheoryFragment("extract", (), (Axiom("extract", parse(EXTRACT), "axiom", "e"),))


# --------------------------------------------------------------------------
# Well-foundedness (Mirimanoff)
# --------------------------------------------------------------------------

def transitive_text(u):
    return f"forall a. forall b. ((a in b and b in {u}) -> a in {u})"


def well_ordered_text(u, strict=False):
    if strict:
        minimal = "exists m. (m in s and forall z. (z in s -> z notin m))"
    else:
        minimal = "exists m. forall z. ((m in s and z in s) -> z notin m)"
    return (
        f"(forall a. (a in {u} -> a notin a))"
        f" and (forall a. forall b. forall c. ((a in {u} and b in {u} and c in {u})"
        f" -> ((a in b and b in c) -> a in c)))"
        f" and (forall a. forall b. ((a in {u} and b in {u}) -> (a != b -> (a in b or b in a))))"
        f" and (forall s. (s sub {u} -> ((exists w. w in s) -> {minimal})))"
    )


def well_founded_text(x, strict=False):
    return (f"exists t. (({transitive_text('t')}) and ({well_ordered_text('t', strict)})"
            f" and {x} sub t)")


def transitive_formula(x="x"):
    return parse(transitive_text(x))


def well_ordered_formula(x="x", strict=False):
    return parse(well_ordered_text(x, strict))


def well_founded_formula(x="x", strict=False, constants=()):
    return parse(well_founded_text(x, strict), constants)


def mirimanoff(strict=False):
    body = well_founded_formula("x", strict)
    return TheoryFragment("mirimanoff" + ("_strict" if strict else ""), (),
                          (Axiom("mirimanoff", uc_instance(body), "uc", "M"),))


# --------------------------------------------------------------------------
# Cardinality
# --------------------------------------------------------------------------

def cardinality_formula(x: str, n: int):
    """|x| = n in the usual first-order encoding."""
    if n < 0:
        raise CatalogError("size must be non-negative")
    X = Var(x)
    if n == 0:
        return Forall("w", Not(Mem(Var("w"), X)))
    names = [f"e{i + 1}" for i in range(n)]
    parts = [Not(Eq(Var(names[i]), Var(names[j]))) for i in range(n) for j in range(i + 1, n)]
    parts.extend(Mem(Var(e), X) for e in names)
    cover = disj(*[Eq(Var("w"), Var(e)) for e in names])
    parts.append(Forall("w", Implies(Mem(Var("w"), X), cover)))
    f = conj(*parts)
    for e in reversed(names):
        f = Exists(e, f)
    return f


def size_eq(n):
    body = cardinality_formula("x", n)
    return TheoryFragment(f"size_eq{n}", (), (Axiom(f"size_eq{n}", uc_instance(body), "uc", "S"),))


def size_neq(n):
    body = Not(cardinality_formula("x", n))
    return TheoryFragment(f"size_neq{n}", (), (Axiom(f"size_neq{n}", uc_instance(body), "uc", "S"),))


def main_self_membership(uc):
    """Sentence: every set with the extension of `uc`'s main set contains itself."""
    shape = classify_uc(uc)
    if shape is None:
        raise CatalogError("not a comprehension instance")
    y, x = shape.main_var, shape.elem_var
    ext = Forall(x, Iff(Mem(Var(x), Var(y)), shape.body))
    return Forall(y, Implies(ext, Mem(Var(y), Var(y))))


# --------------------------------------------------------------------------
# Paradoxical groups
# --------------------------------------------------------------------------

def as_predicate(alpha, var="x"):
    """alpha(var): drop the leading exists, rename the element variable, then y := var."""
    shape = classify_uc(alpha)
    if shape is None or shape.self_referential:
        raise CatalogError("expected a non-self-referential comprehension instance")
    used = all_vars(alpha) | {var}
    w = fresh_name("z", used)
    body = substitute(shape.body, shape.elem_var, Var(w))
    return Forall(w, Iff(Mem(Var(w), Var(var)), body))


def paradoxical_group(n: int) -> TheoryFragment:
    if not isinstance(n, int) or n < 1:
        raise CatalogError("paradoxical group size must be a positive integer")
    if n == 1:
        return russell().rename("group1")
    alphas = [parse(EMPTY)]
    for k in range(1, n - 1):
        premise = conj(*alphas)
        concl = disj(*[as_predicate(a) for a in alphas])
        alphas.append(uc_instance(Implies(premise, concl)))
    beta = uc_instance(Implies(conj(*alphas), Not(Mem(Var("x"), Var("x")))))
    axioms = [Axiom(f"alpha{k}", a, "uc", f"O{k}") for k, a in enumerate(alphas)]
    axioms.append(Axiom("beta", beta, "uc", "Bt"))
    return TheoryFragment(f"group{n}", (), tuple(axioms))


# --------------------------------------------------------------------------
# Curryization, trivializers, fixed points
# --------------------------------------------------------------------------

def _sentence(f, constants=()):
    if isinstance(f, str):
        f = parse(f, constants)
    if free_vars(f):
        raise CatalogError(f"expected a sentence, free variables {sorted(free_vars(f))}")
    return f


def curryize(psi, base):
    """exists y. forall x. (x in y <-> ((psi -> phi(x)) and (not psi -> x notin x)))."""
    psi = _sentence(psi)
    shape = classify_uc(base)
    if shape is None or shape.self_referential:
        raise CatalogError("base must be a non-self-referential comprehension instance")
    x = Var(shape.elem_var)
    body = And(Implies(psi, shape.body), Implies(Not(psi), Not(Mem(x, x))))
    return uc_instance(body, shape.elem_var, shape.main_var)


def trivializer(phi, alpha):
    """exists y. forall x. (x in y <-> ((not phi -> psi(x)) and (phi -> x notin x)))."""
    phi = _sentence(phi)
    shape = classify_uc(alpha)
    if shape is None or shape.self_referential:
        raise CatalogError("alpha must be a non-self-referential comprehension instance")
    x = Var(shape.elem_var)
    body = And(Implies(Not(phi), shape.body), Implies(phi, Not(Mem(x, x))))
    return uc_instance(body, shape.elem_var, shape.main_var)


def beta_corussell():
    phi = parse(CORUSSELL_SELF)
    x = Var("x")
    body = And(Implies(phi, Mem(x, x)), Implies(Not(phi), Not(Mem(x, x))))
    return TheoryFragment("beta_corussell", (), (Axiom("beta", uc_instance(body), "uc", "Bt"),))


@dataclass(frozen=True)
class FixedPointResult:
    fragment: TheoryFragment
    fixpoint_constant: str
    psi: object
    equivalence: object


def separation_body(phi):
    """exists v. exists w. (x = opair(v,w) and phi(w, extr(v)))."""
    bad = free_vars(phi) - {"x", "y"}
    if bad:
        raise CatalogError(f"phi may only have x and y free, found {sorted(bad)}")
    used = all_vars(phi) | {"x", "y"}
    v = fresh_name("v", used)
    used.add(v)
    w = fresh_name("w", used)
    inner = subst_many(phi, {"x": Var(w), "y": Extr(Var(v))})
    return Exists(v, Exists(w, And(Eq(Var("x"), OPair(Var(v), Var(w))), inner)))


def fixed_point(phi, constant="A", square=None, label=None) -> FixedPointResult:
    if isinstance(phi, str):
        phi = parse(phi)
    square = square or f"{constant}2"
    label = label or constant
    body = separation_body(phi)
    sep = uc_instance(body)
    A = Const(constant)
    definition = Forall("x", Iff(Mem(Var("x"), A), body))
    sq_def = Eq(Const(square), Extr(A))
    axioms = (
        Axiom("pair", parse(PAIR), "axiom", "p"),
        Axiom("extract", parse(EXTRACT), "axiom", "e"),
        Axiom(label, sep, "uc", constant),
        Axiom(f"def_{constant}", definition, "definition", constant),
        Axiom(f"def_{square}", sq_def, "definition", square),
    )
    frag = TheoryFragment(f"fixed_point_{constant}", (constant, square), axioms)
    S = Const(square)
    psi = Mem(Var("x"), S)
    equivalence = Forall("x", Iff(Mem(Var("x"), S), subst_many(phi, {"y": S})))
    return FixedPointResult(frag, square, psi, equivalence)


def merge(name, *fragments) -> TheoryFragment:
    consts, axioms, seen = [], [], set()
    for fr in fragments:
        for c in fr.constants:
            if c not in consts:
                consts.append(c)
        for a in fr.axioms:
            if a.label in seen:
                continue
            seen.add(a.label)
            axioms.append(a)
    return TheoryFragment(name, tuple(consts), tuple(axioms))


HPLUS_PHI = "x in x or x = y"
HMINUS_PHI = "x in x and x != y"


def sec4():
    """pair, extract, the two pair-separation instances A and B, and H+ = A[A], H- = B[B]."""
    plus = fixed_point(HPLUS_PHI, "A", "H+")
    minus = fixed_point(HMINUS_PHI, "B", "H-")
    return merge("sec4", plus.fragment, minus.fragment)


def z_separ():
    return fixed_point("x notin y", "Z", "Z2").fragment.rename("z_separ")


def _psi_universal():
    return "(exists u. forall z. (z in u <-> z = z))"


def d_plus():
    text = f"forall x. (x in D+ <-> ((x in x and {_psi_universal()}) or x = D+))"
    return TheoryFragment("d_plus", ("D+",), (Axiom("d_plus", parse(text, ("D+",)), "definition", "D+"),))


def d_minus():
    text = f"forall x. (x in D- <-> ((x in x and {_psi_universal()}) and x != D-))"
    return TheoryFragment("d_minus", ("D-",), (Axiom("d_minus", parse(text, ("D-",)), "definition", "D-"),))


def d_pair_without_universal():
    return merge("d_plus_minus", d_plus(), d_minus(),
                 TheoryFragment("nu", (), (Axiom("no_universal", parse(NO_UNIVERSAL), "axiom"),)))


# --------------------------------------------------------------------------
# Registry
# --------------------------------------------------------------------------

def _int_param(params, name):
    if not params:
        raise CatalogError(f"{name} requires an integer parameter")
    try:
        n = int(params[0])
    except (TypeError, ValueError):
        raise CatalogError(f"{name}: parameter must be an integer, got {params[0]!r}") from None
    if n < 0:
        raise CatalogError(f"{name}: parameter must be non-negative")
    return n


def _component(builder, label):
    def build(_params):
        return builder().restrict([label]) if label else builder()
    return build


CONSTRUCTIONS = {
    "russell": ("Russell set {x : x notin x}", lambda p: russell()),
    "co_russell": ("co-Russell set {x : x in x}", lambda p: co_russell()),
    "curry": ("Curry-like set {x : x in x -> phi}; parameter: sentence phi",
              lambda p: curry(_need(p, "curry"))),
    "universal": ("universal set {x : x = x}", lambda p: universal()),
    "empty": ("empty set {x : x != x}", lambda p: empty()),
    "mirimanoff": ("set of well-founded sets; parameter 'strict' for the corrected minimum clause",
                   lambda p: mirimanoff(strict=bool(p) and p[0] in ("strict", "--wf-strict", True))),
    "size_eq": ("{x : |x| = n}; parameter n", lambda p: size_eq(_int_param(p, "size_eq"))),
    "size_neq": ("{x : |x| != n}; parameter n", lambda p: size_neq(_int_param(p, "size_neq"))),
    "pair": ("pairing, universally closed", lambda p: pair()),
    "extract": ("extraction a[a], universally closed", lambda p: extract()),
    "A": ("pair-separation A for 'w in w or w = v[v]', with H+ = A[A]",
          lambda p: fixed_point(HPLUS_PHI, "A", "H+").fragment.restrict(["A", "def_A"], "A")),
    "B": ("pair-separation B for 'w in w and w != v[v]', with H- = B[B]",
          lambda p: fixed_point(HMINUS_PHI, "B", "H-").fragment.restrict(["B", "def_B"], "B")),
    "sec4": ("pair, extract, A, B and the constants H+ = A[A], H- = B[B]", lambda p: sec4()),
    "z_separ": ("pair, extract and Z-separation with Z2 = Z[Z]", lambda p: z_separ()),
    "d_plus": ("D+ = {x : (x in x and psi) or x = D+}, psi: a universal set exists",
               lambda p: d_plus()),
    "d_minus": ("D- = {x : (x in x and psi) and x != D-}", lambda p: d_minus()),
    "beta_corussell": ("co-Russell trivializer beta", lambda p: beta_corussell()),
    "group": ("paradoxical group of size n; parameter n >= 1",
              lambda p: paradoxical_group(_int_param(p, "group"))),
}


def _need(params, name):
    if not params:
        raise CatalogError(f"{name} requires a sentence parameter")
    return params[0]


def named_construction(name: str, params=()) -> TheoryFragment:
    if name not in CONSTRUCTIONS:
        raise CatalogError(f"unknown construction {name!r}; try one of {sorted(CONSTRUCTIONS)}")
    if isinstance(params, (str, int)):
        params = (params,)
    try:
        return CONSTRUCTIONS[name][1](tuple(params))
    except (TheoryError, ValueError) as e:
        if isinstance(e, CatalogError):
            raise
        raise CatalogError(f"{name}: {e}") from e


def list_constructions():
    return [(k, v[0]) for k, v in CONSTRUCTIONS.items()]


def emit(name, params=()) -> str:
    return named_construction(name, params).to_nst()


def with_sentence(theory, label, sentence, constants=()):
    """`theory` plus one extra (non-comprehension) axiom."""
    if isinstance(sentence, str):
        sentence = parse(sentence, tuple(theory.constants) + tuple(constants))
    return theory.extend(make_axiom(label, sentence), constants=constants)
