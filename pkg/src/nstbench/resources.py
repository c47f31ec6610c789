"""Shipped fixtures: model files, hint files and golden certificates.

``NST_FIXTURES`` overrides the directory.  ``regenerate()`` rebuilds every
file from the catalog; the shipped copies are its output.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from . import catalog as C
from .semantics import FiniteModel, load_model, save_model
from .syntax import Not

PACKAGE_DIR = Path(__file__).resolve().parent / "fixtures"


class FixtureError(FileNotFoundError):
    pass


def fixture_dir() -> Path:
    env = os.environ.get("NST_FIXTURES")
    return Path(env) if env else PACKAGE_DIR


def fixture_path(kind: str, name: str) -> Path:
    p = fixture_dir() / kind / name
    if not p.is_file():
        raise FixtureError(f"missing fixture {p}")
    return p


def model(name: str) -> FiniteModel:
    return load_model(fixture_path("models", f"{name}.json"))


def hints(name: str) -> dict:
    return json.loads(fixture_path("hints", f"{name}.json").read_text(encoding="utf-8"))


def certificate(name: str) -> dict:
    return json.loads(fixture_path("certificates", f"{name}.json").read_text(encoding="utf-8"))


# --------------------------------------------------------------------------
# Theories the hint files refer to
# --------------------------------------------------------------------------

def hplus_goal():
    return C.with_sentence(C.sec4(), "goal_negation", "not H+ in H+").rename("sec4+not(H+ in H+)")


def hminus_goal():
    return C.with_sentence(C.sec4(), "goal_negation", "H- in H-").rename("sec4+(H- in H-)")


def fixed_point_negation(phi=C.HPLUS_PHI, constant="A", square="H+"):
    fp = C.fixed_point(phi, constant, square)
    return C.with_sentence(fp.fragment, "not_equivalence", Not(fp.equivalence)).rename("fixed_point+not_equivalence")


def _hinted():
    from .refuter import derivations as D
    return {
        "sec4": (C.sec4, D.sec4_hints),
        "sec4_hplus_in": (hplus_goal, D.hplus_in_hints),
        "sec4_hminus_notin": (hminus_goal, D.hminus_notin_hints),
        "z_separ": (C.z_separ, D.z_hints),
        "fixed_point_hplus": (fixed_point_negation,
                              lambda t: D.fixed_point_hints(t, "A", "H+", D.hplus_lemmas)),
    }


HINTED_THEORIES = ("sec4", "sec4_hplus_in", "sec4_hminus_notin", "z_separ", "fixed_point_hplus")


def hinted_theory(name):
    return _hinted()[name][0]()


# --------------------------------------------------------------------------
# Hand-built models for the size-n and Mirimanoff constructions
# --------------------------------------------------------------------------

def _model(n, extensions, names):
    return FiniteModel(n, frozenset((a, b) for b, xs in extensions.items() for a in xs), names)


def construction_models():
    return {
        # 0 = {}, 1 = {0}, 2 = {0,1}, 3 = {1}, 4 = M
        "mirimanoff": _model(5, {1: [0], 2: [0, 1], 3: [1], 4: [0, 1, 2, 3]}, {"M": 4}),
        # three Quine atoms, one two-atom set, S = {x : |x| = 2}
        "size_eq2_out": _model(5, {0: [0], 1: [1], 2: [2], 3: [0, 1], 4: [3]}, {"S": 4}),
        "size_eq2_in": _model(5, {0: [0], 1: [1], 2: [2], 3: [0, 1], 4: [3, 4]}, {"S": 4}),
        # two Quine atoms, S = {x : |x| != 2}
        "size_neq2_out": _model(3, {0: [0], 1: [1], 2: [0, 1]}, {"S": 2}),
    }


def regenerate(root=None):
    """Rebuild all fixtures under `root` (default: the package copy)."""
    from .refuter import Bounds, refute

    root = Path(root) if root else PACKAGE_DIR
    for kind in ("models", "hints", "certificates", "theories"):
        (root / kind).mkdir(parents=True, exist_ok=True)
    for name, m in construction_models().items():
        save_model(m, root / "models" / f"{name}.json")
    for name, (build, make) in _hinted().items():
        theory = build()
        (root / "theories" / f"{name}.nst").write_text(theory.to_nst(), encoding="utf-8")
        h = make(theory)
        (root / "hints" / f"{name}.json").write_text(json.dumps(h, indent=1) + "\n", encoding="utf-8")
        if name in ("sec4", "z_separ"):
            out = refute(theory, Bounds(), hints=h)
            if not out.unsat:
                raise RuntimeError(f"{name}: hints no longer refute the theory ({out.reason})")
            (root / "certificates" / f"{name}.json").write_text(out.certificate.dumps() + "\n",
                                                                encoding="utf-8")
    (root / "theories" / "russell.nst").write_text(C.russell().to_nst(), encoding="utf-8")
    out = refute(C.russell(), Bounds())
    (root / "certificates" / "russell.json").write_text(out.certificate.dumps() + "\n", encoding="utf-8")
    return root
