import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nstbench import catalog as C
from nstbench.finder import (SearchBudget, bitmap_of, canonical_bitmap, count_models,
                             enumerate_models, find_model, independence, matrix_of)
from nstbench.semantics import FiniteModel, check_theory, is_extensional
from nstbench.syntax import Forall, Not, free_vars, parse, uc_instance
from nstbench.theory import TheoryFragment, make_axiom
from strategies import random_formula


def brute_relations(n):
    for bits in range(1 << (n * n)):
        yield FiniteModel(n, frozenset((a, b) for a in range(n) for b in range(n)
                                       if (bits >> (n * n - 1 - (a * n + b))) & 1))


def permuted_bitmap(m, perm):
    n = m.size
    return FiniteModel(n, {(perm[a], perm[b]) for a, b in m.membership}).bitmap()


def brute_canonical(n):
    """Minimum bitmap over all permutations, for every extensional relation."""
    perms = list(itertools.permutations(range(n)))
    return {min(permuted_bitmap(m, p) for p in perms)
            for m in brute_relations(n) if is_extensional(m)[0]}


def falling(k, n):
    out = 1
    for i in range(n):
        out *= k - i
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_extensional_counts(n):
    # distinct columns: (2^n)(2^n - 1)...(2^n - n + 1)
    assert count_models(n) == falling(2 ** n, n)
    assert count_models(n, extensional_only=False) == 2 ** (n * n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumeration_matches_brute_force(n):
    got = list(enumerate_models(n))
    want = [m for m in brute_relations(n) if is_extensional(m)[0]]
    assert got == want
    bitmaps = [m.bitmap() for m in got]
    assert bitmaps == sorted(bitmaps)
    assert list(enumerate_models(n, extensional_only=False)) == list(brute_relations(n))


def test_examples():
    assert list(enumerate_models(1)) == [FiniteModel(1), FiniteModel(1, {(0, 0)})]
    assert count_models(2) == 12
    assert count_models(2, canonical_only=True) < 12


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_canonical_representatives(n):
    got = [m.bitmap() for m in enumerate_models(n, canonical_only=True)]
    assert got == sorted(got)
    assert set(got) == brute_canonical(n)
    assert len(got) == {1: 2, 2: 7, 3: 66, 4: 1966}[n]


def test_bitmap_helpers_round_trip():
    rng = random.Random(1)
    for _ in range(50):
        n = rng.randint(1, 4)
        m = FiniteModel(n, {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.5})
        assert bitmap_of(m.matrix) == m.bitmap()
        assert (matrix_of(m.bitmap(), n) == m.matrix).all()
        assert canonical_bitmap(m.matrix) == min(
            permuted_bitmap(m, p) for p in itertools.permutations(range(n)))


# --------------------------------------------------------------------------
# find_model
# --------------------------------------------------------------------------

def test_find_model_co_russell_least():
    r = find_model(C.co_russell())
    assert r.status == "found" and r.model == FiniteModel(1)
    assert r.report.passed


def test_find_model_fixed_point_empty_exhausts():
    r = find_model(C.fixed_point(parse("x != x")).fragment, SearchBudget(max_size=4))
    assert r.status == "exhausted"
    assert r.stats["sizes"] == [1, 2, 3, 4]


def test_find_model_d_pair():
    r = find_model(C.d_pair_without_universal())
    assert r.found
    m = r.model
    assert m.size == 2
    assert m.extension(m.constants["D-"]) == frozenset()
    d = m.constants["D+"]
    assert m.extension(d) == {d}


def test_find_model_timeout_is_distinct():
    r = find_model(C.fixed_point(parse("x != x")).fragment, SearchBudget(time_limit=0.01))
    assert r.status == "timeout"


def test_find_model_deterministic_across_workers():
    g = C.paradoxical_group(3)
    t = g.restrict(g.labels[:2])
    a = find_model(t, SearchBudget(max_size=3, workers=1))
    b = find_model(t, SearchBudget(max_size=3, workers=2))
    assert a.found and a.model == b.model
    assert a.report.to_json() == b.report.to_json()
    fp = C.fixed_point(parse("x != x")).fragment
    a = find_model(fp, SearchBudget(workers=1))
    b = find_model(fp, SearchBudget(workers=3))
    assert a.status == b.status == "exhausted"
    assert a.stats["models_checked"] == b.stats["models_checked"]


def test_find_model_with_constants_is_least():
    t = C.d_pair_without_universal()
    r = find_model(t, SearchBudget(max_size=2))
    # no smaller size and no lexicographically smaller assignment at size 2
    for m in enumerate_models(1):
        for v in range(1):
            assert not check_theory(m.with_constants({"D+": v, "D-": v}), t).passed
    for m in enumerate_models(2):
        for dp, dm in itertools.product(range(2), repeat=2):
            cand = m.with_constants({"D+": dp, "D-": dm})
            if check_theory(cand, t).passed:
                assert cand == r.model
                return
    pytest.fail("no model found by brute force")


def random_theory(seed):
    rng = random.Random(seed)
    axioms = []
    for k in range(rng.randint(1, 2)):
        body = random_formula(rng, rng.randint(0, 3), variables=("x", "z"), exact=False)
        if "z" in free_vars(body):
            body = Forall("z", body)
        axioms.append(make_axiom(f"u{k}", uc_instance(body), "uc"))
    return TheoryFragment(f"random{seed}", (), tuple(axioms))


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32), st.integers(1, 3))
def test_canonical_and_full_enumeration_agree(seed, n):
    t = random_theory(seed)
    full = find_model(t, SearchBudget(max_size=n))
    canon = find_model(t, SearchBudget(max_size=n, canonical_only=True))
    assert full.found == canon.found
    if full.found:
        assert full.model.size == canon.model.size


@pytest.mark.parametrize("name", ["russell", "co_russell", "universal", "empty", "pair", "extract"])
def test_canonical_and_full_agree_on_catalog(name):
    t = C.named_construction(name)
    for n in (1, 2, 3):
        a = find_model(t, SearchBudget(max_size=n)).found
        b = find_model(t, SearchBudget(max_size=n, canonical_only=True)).found
        assert a == b


# --------------------------------------------------------------------------
# independence
# --------------------------------------------------------------------------

BST = TheoryFragment("bst", (), ())


def test_independence_co_russell():
    uc = C.co_russell().axioms[0].formula
    v = independence(C.co_russell(), C.main_self_membership(uc))
    assert v.status == "Independent"
    assert v.pos_model.size == 1 and v.neg_model.size == 1
    assert v.pos_model == FiniteModel(1, {(0, 0)})


def test_independence_validity():
    v = independence(BST, parse("forall a. a = a"))
    assert v.status == "DecidedPositive"
    assert v.certificate is not None


def test_independence_size_neq_1():
    t = C.size_neq(1)
    v = independence(t, C.main_self_membership(t.axioms[0].formula))
    assert v.status == "Independent"
    for model, phi in ((v.pos_model, True), (v.neg_model, False)):
        sent = C.main_self_membership(t.axioms[0].formula)
        assert check_theory(model, t.extend(make_axiom("s", sent if phi else Not(sent), "axiom"))).passed


def test_independence_inconsistent_theory():
    v = independence(C.russell(), parse("forall a. a = a"), SearchBudget(max_size=2))
    assert v.status == "TheoryInconsistent"
