"""Reproduction suite: one item per result, each with an expected verdict.

Items are pure functions of the catalog and the fixture directory, so the
JSON report is byte-identical across runs.  Wall-clock times appear only in
the human table and the runtime figure.
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import catalog as C
from . import resources as R
from .finder import SearchBudget, find_model, independence
from .refuter import Bounds, check_certificate, refute
from .semantics import check_theory, eval_formula
from .syntax import Not, parse
from .theory import Axiom, TheoryFragment


class UnknownItem(KeyError):
    pass


@dataclass(frozen=True)
class DemoItem:
    id: str
    task: str
    expected: str
    budget: float                   # seconds
    run: Callable


@dataclass
class ItemResult:
    id: str
    task: str
    expected: str
    observed: str
    budget: float
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    error: str = ""

    @property
    def passed(self) -> bool:
        return not self.error and self.observed == self.expected

    def to_json(self):
        out = {"id": self.id, "task": self.task, "expected": self.expected,
               "observed": self.observed, "passed": self.passed, "budget": self.budget,
               "details": self.details}
        if self.error:
            out["error"] = self.error
        return out


# --------------------------------------------------------------------------
# Item bodies: each returns (observed verdict, details)
# --------------------------------------------------------------------------

def _refuted(theory, hints=None, bounds=Bounds()):
    out = refute(theory, bounds, hints=hints)
    if not out.unsat:
        return "Unknown", {"reason": out.reason, "rounds_done": out.rounds_done}
    check = check_certificate(out.certificate, theory)
    details = {"rounds": out.certificate.rounds, "core_clauses": len(out.certificate.core),
               "core_atoms": out.certificate.atom_count, "check": check.method,
               "sat_calls": out.stats.get("sat_calls")}
    if check.step_methods:
        details["steps"] = [{"name": n, "method": m, "atoms": a} for n, m, a in check.step_methods]
    return ("Refuted" if check else "Unverified"), details


def _russell():
    return _refuted(C.russell())


def _curry():
    return _refuted(C.curry(C.NO_UNIVERSAL))


def _mirimanoff():
    m = R.model("mirimanoff")
    readings = {}
    for strict in (False, True):
        report = check_theory(m, C.mirimanoff(strict))
        wf = eval_formula(m, C.well_founded_formula("x", strict), {"x": m.constants["M"]})
        readings["strict" if strict else "verbatim"] = {"passes": report.passed, "well_founded_M": wf}
    ok = all(r["passes"] and not r["well_founded_M"] for r in readings.values())
    return ("Not paradoxical" if ok else "Fixture rejected"), {"readings": readings, "model": m.to_json()}


def _group(n):
    def body():
        g = C.paradoxical_group(n)
        verdict, det = _refuted(g)
        subsets = {}
        for k in range(len(g.axioms)):
            for sub in itertools.combinations(g.labels, k):
                r = find_model(g.restrict(sub))
                subsets["+".join(sub) or "(none)"] = r.model.size if r.found else None
        consistent = all(s is not None and s <= 8 for s in subsets.values())
        det["proper_subset_model_sizes"] = subsets
        ok = verdict == "Refuted" and consistent
        return ("Paradoxical group" if ok else "Not a paradoxical group"), det
    return body


def _reaxiomatize():
    psi = parse(C.EMPTY)
    ax = C.curryize(psi, psi)
    th = TheoryFragment("curryized", (), (Axiom("curryized", ax, "uc", "Cu"),))
    r = find_model(th)
    forced = _refuted(C.with_sentence(th, "not_psi", Not(psi)))[0]
    psi_holds = r.found and eval_formula(r.model, psi)
    ok = r.found and psi_holds and forced == "Refuted"
    return ("Forces psi" if ok else "Does not force psi"), {
        "model": r.model.to_json() if r.found else None, "with_not_psi": forced}


def _independence(theory, phi):
    v = independence(theory, phi)
    det = {"pos_model": v.pos_model.to_json() if v.pos_model else None,
           "neg_model": v.neg_model.to_json() if v.neg_model else None}
    return v.status, det


def _corussell():
    status, det = _independence(C.co_russell(), parse(C.CORUSSELL_SELF))
    sizes = [det[k]["size"] for k in ("pos_model", "neg_model") if det[k]]
    if status == "Independent" and sizes != [1, 1]:
        status = "Independent (larger witnesses)"
    return status, det


def _size_family(builders):
    def body():
        det = {}
        statuses = set()
        for build in builders:
            fr = build()
            status, d = _independence(fr, C.main_self_membership(fr.axioms[0].formula))
            det[fr.name] = {"status": status, **d}
            statuses.add(status)
        return ("Independent" if statuses == {"Independent"} else "/".join(sorted(statuses))), det
    return body


def _sizes_n2():
    det = {}
    ok = True
    for name, theory, member in (("size_eq2_out", C.size_eq(2), False),
                                 ("size_eq2_in", C.size_eq(2), True),
                                 ("size_neq2_out", C.size_neq(2), False)):
        m = R.model(name)
        s = m.constants["S"]
        passes = check_theory(m, theory).passed
        self_member = (s, s) in m.membership
        det[name] = {"passes": passes, "S_in_S": self_member, "model": m.to_json()}
        ok = ok and passes and self_member == member
    det["size_neq2_in"] = "not desk-verifiable: needs infinitely many Quine atoms"
    return ("Fixtures confirmed" if ok else "Fixture rejected"), det


def _beta():
    r = find_model(C.beta_corussell())
    det = {"model": r.model.to_json() if r.found else None}
    if not r.found:
        return "No model", det
    exists = eval_formula(r.model, parse(C.CO_RUSSELL))
    self_member = eval_formula(r.model, parse(C.CORUSSELL_SELF))
    trivial = _refuted(C.with_sentence(C.beta_corussell(), "not_phi", Not(parse(C.CORUSSELL_SELF))))[0]
    det.update({"corussell_exists": exists, "corussell_self_member": self_member,
                "with_not_phi": trivial})
    ok = exists and self_member and trivial == "Refuted"
    return ("Self-membership forced" if ok else "Not forced"), det


def _sec4():
    verdict, det = _refuted(C.sec4(), R.hints("sec4"))
    for name in ("sec4_hplus_in", "sec4_hminus_notin"):
        det[name] = _refuted(R.hinted_theory(name), R.hints(name))[0]
    steps = det.get("steps", [])
    steps_ok = bool(steps) and all(s["method"] == "truth-table" for s in steps)
    det["steps_truth_table"] = steps_ok
    ok = verdict == "Refuted" and steps_ok and det["sec4_hplus_in"] == det["sec4_hminus_notin"] == "Refuted"
    return ("Refuted" if ok else verdict if verdict != "Refuted" else "Incomplete"), det


def _fixed_point():
    return _refuted(R.hinted_theory("fixed_point_hplus"), R.hints("fixed_point_hplus"))


def _z():
    return _refuted(C.z_separ(), R.hints("z_separ"))


def _dplus():
    r = find_model(C.d_pair_without_universal(), SearchBudget(max_size=2))
    if not r.found:
        return "No model", {}
    m = r.model
    dm, dp = m.constants["D-"], m.constants["D+"]
    shape = m.size == 2 and m.extension(dm) == frozenset() and m.extension(dp) == frozenset({dp})
    return ("Empty set and Quine atom" if shape else "Other model"), {"model": m.to_json()}


ITEMS = (
    DemoItem("thm-russell", "refute BST + Russell set", "Refuted", 1, _russell),
    DemoItem("thm-curry", "refute BST + Curry-like set with phi = 'no universal set'", "Refuted", 10, _curry),
    DemoItem("thm-mirimanoff", "5-element fixture satisfies BST + Mirimanoff set under both readings, M not well-founded",
             "Not paradoxical", 10, _mirimanoff),
    DemoItem("group-n1", "size-1 group refuted, proper subsets satisfiable", "Paradoxical group", 60, _group(1)),
    DemoItem("group-n2", "size-2 group refuted, proper subsets satisfiable", "Paradoxical group", 60, _group(2)),
    DemoItem("group-n3", "size-3 group refuted, proper subsets satisfiable", "Paradoxical group", 60, _group(3)),
    DemoItem("thm-reaxiomatize", "Curry-style instance is satisfiable and refuted once psi is denied",
             "Forces psi", 10, _reaxiomatize),
    DemoItem("thm-corussell-indep", "co-Russell self-membership: two size-1 witnesses", "Independent", 1, _corussell),
    DemoItem("sizes-n0", "{x : |x| != 0}: self-membership both ways", "Independent", 30,
             _size_family([lambda: C.size_neq(0)])),
    DemoItem("sizes-n1", "{x : |x| = 1} and {x : |x| != 1}: self-membership both ways", "Independent", 30,
             _size_family([lambda: C.size_eq(1), lambda: C.size_neq(1)])),
    DemoItem("sizes-n2", "n = 2 construction fixtures checked by the evaluator", "Fixtures confirmed", 30, _sizes_n2),
    DemoItem("thm-beta-corussell", "beta has a model with a self-membered co-Russell set; beta + not phi refuted",
             "Self-membership forced", 60, _beta),
    DemoItem("sec4-paradox", "hinted refutation of pair, extract, A, B; H+ in H+ and H- notin H- standalone",
             "Refuted", 30, _sec4),
    DemoItem("sec5-fixedpoint", "negated fixed-point equivalence for 'x in x or x = y' refuted with hints",
             "Refuted", 30, _fixed_point),
    DemoItem("sec5-z", "hinted refutation of pair, extract, Z-separation", "Refuted", 30, _z),
    DemoItem("sec6-dplus", "D+ and D- without a universal set: size-2 model", "Empty set and Quine atom", 1, _dplus),
)

BY_ID = {item.id: item for item in ITEMS}


def run_item(item_id: str) -> ItemResult:
    item = BY_ID[item_id]
    t0 = time.perf_counter()
    try:
        observed, details = item.run()
        error = ""
    except R.FixtureError:
        raise
    except Exception as e:  # reported per item; the suite keeps going
        observed, details, error = "Error", {}, f"{type(e).__name__}: {e}"
    return ItemResult(item.id, item.task, item.expected, observed, item.budget, details,
                      time.perf_counter() - t0, error)


def run_demo(ids=None, parallel: int = 1):
    ids = list(ids) if ids else [i.id for i in ITEMS]
    unknown = [i for i in ids if i not in BY_ID]
    if unknown:
        raise UnknownItem(f"unknown demo item(s): {unknown}")
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(run_item, ids))
    return [run_item(i) for i in ids]


def report_json(results) -> str:
    return json.dumps({"items": [r.to_json() for r in results],
                       "all_passed": all(r.passed for r in results)}, indent=1, sort_keys=True) + "\n"


def report_table(results) -> str:
    rows = [("item", "expected", "observed", "time", "")]
    for r in results:
        mark = "ok" if r.passed else "MISMATCH"
        if r.passed and r.seconds > r.budget:
            mark = "ok (over budget)"
        rows.append((r.id, r.expected, r.observed + (f" [{r.error}]" if r.error else ""),
                     f"{r.seconds:.2f}s", mark))
    widths = [max(len(row[k]) for row in rows) for k in range(5)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} items match")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Figures
# --------------------------------------------------------------------------

def _draw_model(ax, model, title):
    import numpy as np
    from matplotlib.patches import Circle

    n = model["size"]
    angles = np.pi / 2 - 2 * np.pi * np.arange(n) / max(n, 1)
    pos = np.c_[np.cos(angles), np.sin(angles)] if n > 1 else np.zeros((1, 2))
    names = {}
    for k, v in model.get("names", {}).items():
        names.setdefault(v, []).append(k)
    for a, b in model["in"]:
        if a == b:
            c = pos[a] * 1.25 if n > 1 else np.array([0, 0.25])
            ax.add_patch(Circle(c, 0.18, fill=False, lw=1.2, color="0.3"))
        else:
            ax.annotate("", xy=pos[b], xytext=pos[a],
                        arrowprops=dict(arrowstyle="-|>", color="0.3", lw=1.2,
                                        shrinkA=12, shrinkB=12, connectionstyle="arc3,rad=0.15"))
    for i in range(n):
        ax.plot(*pos[i], "o", ms=18, mfc="white", mec="k")
        ax.text(*pos[i], str(i), ha="center", va="center", fontsize=9)
        if i in names:
            ax.text(pos[i][0], pos[i][1] - 0.32, ",".join(sorted(names[i])), ha="center", fontsize=8, color="C3")
    ax.set_title(title, fontsize=9)
    ax.set_xlim(-1.7, 1.7)
    ax.set_ylim(-1.7, 1.7)
    ax.set_aspect("equal")
    ax.axis("off")


def _witness_models(results):
    out = []
    for r in results:
        d = r.details
        if "model" in d and isinstance(d["model"], dict):
            out.append((r.id, d["model"]))
        for side in ("pos_model", "neg_model"):
            if d.get(side):
                out.append((f"{r.id} {side.split('_')[0]}", d[side]))
        for k, v in d.items():
            if isinstance(v, dict) and isinstance(v.get("model"), dict):
                out.append((k, v["model"]))
    return out


def write_figures(results, directory) -> list:
    """Runtime bars, witness-model digraphs and lemma-step sizes; returns the written paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(7, 0.35 * len(results) + 1))
    ys = range(len(results))
    ax.barh(list(ys), [max(r.seconds, 1e-3) for r in results],
            color=["C2" if r.passed else "C3" for r in results])
    ax.scatter([r.budget for r in results], list(ys), marker="|", s=120, color="k", label="budget")
    ax.set_yticks(list(ys))
    ax.set_yticklabels([r.id for r in results], fontsize=8)
    ax.invert_yaxis()
    ax.set_xscale("log")
    ax.set_xlabel("seconds")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    path = directory / "runtimes.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    models = _witness_models(results)
    if models:
        cols = min(4, len(models))
        rows = -(-len(models) // cols)
        fig, axes = plt.subplots(rows, cols, figsize=(2.6 * cols, 2.6 * rows), squeeze=False)
        for ax in axes.flat:
            ax.axis("off")
        for ax, (title, m) in zip(axes.flat, models):
            _draw_model(ax, m, title)
        fig.suptitle("witness models (arrow a -> b means a in b)", fontsize=10)
        fig.tight_layout()
        path = directory / "witness_models.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    steps = next((r.details.get("steps") for r in results if r.id == "sec4-paradox"), None)
    if steps:
        fig, ax = plt.subplots(figsize=(8, 3.2))
        ax.bar(range(len(steps)), [s["atoms"] for s in steps], color="C0")
        ax.axhline(20, color="C3", ls="--", lw=1, label="truth-table limit")
        ax.set_xticks(range(len(steps)))
        ax.set_xticklabels([s["name"] for s in steps], rotation=70, ha="right", fontsize=7)
        ax.set_ylabel("distinct atoms")
        ax.set_ylim(0, 23)
        ax.set_title("co-Russell paradox certificate: atoms per lemma step", fontsize=10)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = directory / "sec4_steps.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
