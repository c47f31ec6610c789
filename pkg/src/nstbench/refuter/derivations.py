"""Hint files for the derivations that need deep instances.

Each builder returns a hints dict: a flat ``instantiations`` list is empty
and every instance sits in a lemma step, so the same file both decides the
theory in one SAT call (the union of all steps) and yields a certificate
whose steps are small enough for truth-table checking.

The key ingredient is ordered-pair inversion: from
``p(p(a,a),p(a,b)) = p(p(c,c),p(c,d))`` infer ``a = c`` and ``b = d``,
done by the usual case split on which pair equals which.
"""

from __future__ import annotations

from .clausify import clausify
from .terms import orient, render, render_literal


def P(a, b):
    return ("p", ("p", a, a), ("p", a, b))


def C(name):
    return (name,)


def lit(sign, pred, s, t):
    return render_literal((sign, orient((pred, s, t))))


class HintBuilder:
    def __init__(self, theory):
        self.cs = clausify(theory)
        self.by_label = {}
        for c in self.cs.clauses:
            self.by_label.setdefault(c.label, []).append(c)
        self.steps = []

    def witnesses(self, label):
        """Skolem witness symbols introduced by axiom `label`, in creation order."""
        names = [s.name for s in self.cs.skolems.values() if s.source == label and s.kind == "witness"]
        return sorted(names, key=lambda n: int(n.rsplit("_", 1)[1]))

    def inst(self, label, **subst):
        """Instances of every clause of `label` whose variables are all bound."""
        out = []
        for c in self.by_label.get(label, []):
            if all(v in subst for v in c.vars):
                out.append({"clause": c.id, "subst": {v: render(subst[v]) for v in c.vars}})
        if not out:
            raise ValueError(f"no clause of {label!r} matches bindings {sorted(subst)}")
        return out

    def step(self, name, lemma, insts, uses=()):
        flat = [i for group in insts for i in group]
        self.steps.append({"name": name, "lemma": list(lemma), "uses": list(uses),
                           "instantiations": flat})
        return name

    def hints(self):
        return {"instantiations": [], "steps": self.steps}

    # ------------------------------------------------------------------
    def pair_inversion(self, tag, a, b, c, d):
        """Steps proving  P(a,b) = P(c,d) -> a = c  and  -> b = d."""
        u, v = P(a, b), P(c, d)
        neq = lit(False, "=", u, v)
        paa, pab, pcc, pcd = ("p", a, a), ("p", a, b), ("p", c, c), ("p", c, d)
        first = self.step(f"{tag}.first", [neq, lit(True, "=", a, c)], [
            self.inst("pair", x=paa, a=paa, b=pab),
            self.inst("pair", x=paa, a=pcc, b=pcd),
            self.inst("pair", x=c, a=c, b=c),
            self.inst("pair", x=c, a=c, b=d),
            self.inst("pair", x=c, a=a, b=a),
        ])
        split = self.step(f"{tag}.split", [neq, lit(True, "=", b, c), lit(True, "=", b, d)], [
            self.inst("pair", x=pab, a=paa, b=pab),
            self.inst("pair", x=pab, a=pcc, b=pcd),
            self.inst("pair", x=b, a=a, b=b),
            self.inst("pair", x=b, a=c, b=c),
            self.inst("pair", x=b, a=c, b=d),
        ])
        degenerate = self.step(f"{tag}.degenerate", [neq, lit(False, "=", a, b), lit(True, "=", b, d)], [
            self.inst("pair", x=pcd, a=pcc, b=pcd),
            self.inst("pair", x=pcd, a=paa, b=pab),
            self.inst("pair", x=d, a=c, b=d),
            self.inst("pair", x=d, a=a, b=a),
            self.inst("pair", x=d, a=a, b=b),
        ])
        second = self.step(f"{tag}.second", [neq, lit(True, "=", b, d)], [],
                           uses=[first, split, degenerate])
        return first, second

    def unfold(self, tag, K, S, t, forward_lemmas, backward_lemmas):
        """x := t in  x in S <-> phi(x, S)  for S = extr(K) and K a pair-separation constant.

        forward_lemmas / backward_lemmas: literal lists of the clauses of
        ``t in S -> phi`` and ``phi -> t in S``.
        """
        pt = P(K, t)
        w = self.witnesses(f"def_{K[0]}")
        s1, s2 = (w[0], pt), (w[1], pt)
        first, second = self.pair_inversion(f"{tag}.inv", K, t, s1, s2)
        common = [self.inst(f"def_{S[0]}"), self.inst("extract", a=K, x=t)]
        names = []
        for k, lemma in enumerate(forward_lemmas):
            names.append(self.step(f"{tag}.fwd{k}", lemma,
                                   common + [self.inst(f"def_{K[0]}", x=pt)], uses=[first, second]))
        for k, lemma in enumerate(backward_lemmas):
            names.append(self.step(f"{tag}.bwd{k}", lemma,
                                   common + [self.inst(f"def_{K[0]}", x=pt, v=K, w=t)]))
        return names


def hplus_lemmas(t, S):
    fwd = [[lit(False, "in", t, S), lit(True, "in", t, t), lit(True, "=", t, S)]]
    bwd = [[lit(True, "in", t, S), lit(False, "in", t, t)], [lit(True, "in", t, S), lit(False, "=", t, S)]]
    return fwd, bwd


def hminus_lemmas(t, S):
    fwd = [[lit(False, "in", t, S), lit(True, "in", t, t)], [lit(False, "in", t, S), lit(False, "=", t, S)]]
    bwd = [[lit(True, "in", t, S), lit(False, "in", t, t), lit(True, "=", t, S)]]
    return fwd, bwd


def sec4_hints(theory):
    """H+ in H+, H- notin H-, Lemma-1 instances at the extensionality witness, then false."""
    b = HintBuilder(theory)
    A, B, Hp, Hm = C("A"), C("B"), C("H+"), C("H-")
    hp = b.step("hplus_in", [lit(True, "in", Hp, Hp)], [
        b.inst("def_H+"), b.inst("extract", a=A, x=Hp), b.inst("def_A", x=P(A, Hp), v=A, w=Hp)])
    wB = b.witnesses("def_B")
    pm = P(B, Hm)
    first, second = b.pair_inversion("hminus.inv", B, Hm, (wB[0], pm), (wB[1], pm))
    hm = b.step("hminus_notin", [lit(False, "in", Hm, Hm)], [
        b.inst("def_H-"), b.inst("extract", a=B, x=Hm), b.inst("def_B", x=pm)], uses=[first, second])
    ex = b.witnesses("exten")[0]
    c = (ex, Hp, Hm)
    plus = b.unfold("lemma1_plus", A, Hp, c, *hplus_lemmas(c, Hp))
    minus = b.unfold("lemma1_minus", B, Hm, c, *hminus_lemmas(c, Hm))
    b.step("contradiction", [], [b.inst("exten", y=Hp, z=Hm)], uses=[hp, hm] + plus + minus)
    return b.hints()


def hplus_in_hints(theory):
    b = HintBuilder(theory)
    A, Hp = C("A"), C("H+")
    hp = b.step("hplus_in", [lit(True, "in", Hp, Hp)], [
        b.inst("def_H+"), b.inst("extract", a=A, x=Hp), b.inst("def_A", x=P(A, Hp), v=A, w=Hp)])
    b.step("contradiction", [], [b.inst("goal_negation")], uses=[hp])
    return b.hints()


def hminus_notin_hints(theory):
    b = HintBuilder(theory)
    B, Hm = C("B"), C("H-")
    wB = b.witnesses("def_B")
    pm = P(B, Hm)
    first, second = b.pair_inversion("hminus.inv", B, Hm, (wB[0], pm), (wB[1], pm))
    hm = b.step("hminus_notin", [lit(False, "in", Hm, Hm)], [
        b.inst("def_H-"), b.inst("extract", a=B, x=Hm), b.inst("def_B", x=pm)], uses=[first, second])
    b.step("contradiction", [], [b.inst("goal_negation")], uses=[hm])
    return b.hints()


def z_hints(theory, K="Z", S="Z2"):
    """Z2 in Z2 <-> Z2 notin Z2."""
    b = HintBuilder(theory)
    Kc, Sc = C(K), C(S)
    fwd = [[lit(False, "in", Sc, Sc)]]
    bwd = [[lit(True, "in", Sc, Sc)]]
    names = b.unfold("diag", Kc, Sc, Sc, fwd, bwd)
    b.step("contradiction", [], [], uses=names)
    return b.hints()


def fixed_point_hints(theory, K, S, lemmas, label="not_equivalence"):
    """Refute the negated fixed-point equivalence at its Skolem counterexample."""
    b = HintBuilder(theory)
    cex = C(sorted(n for n, s in b.cs.skolems.items() if s.source == label)[0])
    fwd, bwd = lemmas(cex, C(S))
    names = b.unfold("unfold", C(K), C(S), cex, fwd, bwd)
    b.step("contradiction", [], [b.inst(label)], uses=names)
    return b.hints()
