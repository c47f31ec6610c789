"""Acceptance criteria 1-11, each at its stated time limit.

Run with ``pytest tests/test_acceptance.py``; the terminal summary lists one
PASS/FAIL line per criterion.
"""

import itertools
import time

import pytest

from nstbench import catalog as C
from nstbench import resources as R
from nstbench.finder import SearchBudget, find_model, independence
from nstbench.refuter import Bounds, check_certificate, refute
from nstbench.semantics import check_theory, eval_formula
from nstbench.syntax import Not, parse


class Clock:
    def __init__(self, limit):
        self.limit = limit
        self.t0 = time.perf_counter()

    def check(self):
        elapsed = time.perf_counter() - self.t0
        assert elapsed < self.limit, f"took {elapsed:.2f}s, limit {self.limit}s"


def refuted_and_checked(theory, hints=None):
    out = refute(theory, Bounds(), hints=hints)
    assert out.unsat, out.reason
    check = check_certificate(out.certificate, theory)
    assert check, check.reason
    return out, check


@pytest.mark.criterion(1, "Russell set refuted in round 1, certificate checks")
def test_criterion_1_russell():
    clock = Clock(1)
    out, _ = refuted_and_checked(C.russell())
    assert out.certificate.rounds == 1
    clock.check()


@pytest.mark.criterion(2, "Curry-like set with phi = 'no universal set' refuted")
def test_criterion_2_curry():
    clock = Clock(10)
    refuted_and_checked(C.curry(parse(C.NO_UNIVERSAL)))
    clock.check()


@pytest.mark.criterion(3, "Mirimanoff fixture passes both readings, M not well-founded")
def test_criterion_3_mirimanoff():
    clock = Clock(10)
    m = R.model("mirimanoff")
    assert m.size == 5
    for strict in (False, True):
        assert check_theory(m, C.mirimanoff(strict)).passed
        assert not eval_formula(m, C.well_founded_formula("x", strict), {"x": m.constants["M"]})
    clock.check()


@pytest.mark.criterion(4, "paradoxical groups n=1..3 refuted, proper subsets have models of size <= 8")
def test_criterion_4_groups():
    clock = Clock(180)
    for n in (1, 2, 3):
        g = C.paradoxical_group(n)
        refuted_and_checked(g)
        for k in range(len(g.axioms)):
            for sub in itertools.combinations(g.labels, k):
                r = find_model(g.restrict(sub), SearchBudget(max_size=4))
                assert r.found and r.model.size <= 8, (n, sub)
                assert check_theory(r.model, g.restrict(sub)).passed
    clock.check()


@pytest.mark.criterion(5, "co-Russell self-membership independent, two size-1 witnesses")
def test_criterion_5_corussell():
    clock = Clock(1)
    v = independence(C.co_russell(), parse(C.CORUSSELL_SELF))
    assert v.status == "Independent"
    assert v.pos_model.size == v.neg_model.size == 1
    clock.check()


@pytest.mark.criterion(6, "size-n self-membership independent for n in {0,1}; n=2 fixtures confirmed")
def test_criterion_6_sizes():
    clock = Clock(30)
    for fr in (C.size_neq(0), C.size_eq(1), C.size_neq(1)):
        v = independence(fr, C.main_self_membership(fr.axioms[0].formula))
        assert v.status == "Independent", fr.name
        for m, expected in ((v.pos_model, True), (v.neg_model, False)):
            assert check_theory(m, fr).passed
            assert eval_formula(m, C.main_self_membership(fr.axioms[0].formula)) == expected
    for name, theory, member in (("size_eq2_out", C.size_eq(2), False),
                                 ("size_eq2_in", C.size_eq(2), True),
                                 ("size_neq2_out", C.size_neq(2), False)):
        m = R.model(name)
        assert check_theory(m, theory).passed, name
        s = m.constants["S"]
        assert ((s, s) in m.membership) == member, name
    clock.check()


@pytest.mark.criterion(7, "beta has a model with a self-membered co-Russell set; beta + not phi refuted")
def test_criterion_7_beta():
    clock = Clock(60)
    r = find_model(C.beta_corussell())
    assert r.found
    assert eval_formula(r.model, parse(C.CO_RUSSELL))
    assert eval_formula(r.model, parse(C.CORUSSELL_SELF))
    refuted_and_checked(C.with_sentence(C.beta_corussell(), "not_phi", Not(parse(C.CORUSSELL_SELF))))
    clock.check()


@pytest.mark.criterion(8, "hinted refutation of pair, extract, A, B; steps truth-table checked; H+/H- lemmas")
def test_criterion_8_sec4():
    clock = Clock(30)
    out, check = refuted_and_checked(C.sec4(), R.hints("sec4"))
    assert check.step_methods
    assert all(method == "truth-table" for _, method, _ in check.step_methods)
    for name in ("sec4_hplus_in", "sec4_hminus_notin"):
        refuted_and_checked(R.hinted_theory(name), R.hints(name))
    clock.check()


@pytest.mark.criterion(9, "fixed point for 'x in x or x = y' proved with hints; Z-separation refuted")
def test_criterion_9_fixed_point():
    clock = Clock(30)
    fp = C.fixed_point(C.HPLUS_PHI, "A", "H+")
    theory = R.hinted_theory("fixed_point_hplus")
    assert Not(fp.equivalence) in [a.formula for a in theory.axioms]
    refuted_and_checked(theory, R.hints("fixed_point_hplus"))
    clock.check()
    clock = Clock(30)
    z = C.fixed_point("x notin y", "Z", "Z2").fragment
    assert z.axioms == C.z_separ().axioms
    refuted_and_checked(z, R.hints("z_separ"))
    clock.check()


@pytest.mark.criterion(10, "D+ and D- without a universal set: size-2 model, empty set and Quine atom")
def test_criterion_10_dplus():
    clock = Clock(1)
    r = find_model(C.d_pair_without_universal())
    assert r.found and r.model.size == 2
    m = r.model
    dm, dp = m.constants["D-"], m.constants["D+"]
    assert m.extension(dm) == frozenset()
    assert m.extension(dp) == frozenset({dp})
    assert not eval_formula(m, C.universal_exists())
    clock.check()


@pytest.mark.criterion(11, "property suites: evaluator oracle, round trip, refuter/finder agreement, tampering")
def test_criterion_11_property_suites():
    import test_refuter as TR
    import test_semantics as TS
    import test_syntax as TX

    for d in range(7):
        TS.test_relational_matches_naive_exhaustive(d)
    TX.test_round_trip()
    for name, theory, hints in TR.demo_theories():
        TR.test_demo_theories_refuted_and_modelless(name, theory, hints)
    cert = R.certificate("russell")
    for test in (TR.test_tampered_substitution, TR.test_tampered_literal, TR.test_tampered_core,
                 TR.test_tampered_skolem_map, TR.test_tampered_origin, TR.test_certificate_for_other_theory,
                 TR.test_status_must_be_unsat):
        test(cert)
    TR.test_tampered_lemma()
    TR.test_tampered_equality_axiom()
