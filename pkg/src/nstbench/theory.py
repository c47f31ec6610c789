"""Theory fragments: named, ordered axiom lists over a constant signature.

The ``.nst`` text form is one sentence per line.  A line may start with a
bracketed tag ``[label]``, ``[label : kind]`` or ``[label : kind main]``;
``#`` starts a comment and ``# constants: A B`` declares the signature.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from . import syntax
from .syntax import classify_uc, constants as formula_constants, free_vars, parse, render

KINDS = ("uc", "definition", "axiom")


class TheoryError(ValueError):
    pass


@dataclass(frozen=True)
class Axiom:
    label: str
    formula: object
    kind: str = "axiom"
    # UC instances: preferred name of the main set; definitions: the defined constant.
    main: Optional[str] = None


@dataclass(frozen=True)
class TheoryFragment:
    name: str
    constants: tuple = ()
    axioms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(self.constants))
        object.__setattr__(self, "axioms", tuple(self.axioms))
        self.validate()

    def validate(self):
        seen = set()
        declared = set(self.constants)
        if len(declared) != len(self.constants):
            raise TheoryError(f"{self.name}: duplicate constant declaration")
        for ax in self.axioms:
            if ax.label in seen:
                raise TheoryError(f"{self.name}: duplicate label {ax.label!r}")
            seen.add(ax.label)
            if ax.kind not in KINDS:
                raise TheoryError(f"{ax.label}: unknown kind {ax.kind!r}")
            fv = free_vars(ax.formula)
            if fv:
                raise TheoryError(f"{ax.label}: not a sentence, free {sorted(fv)}")
            undeclared = formula_constants(ax.formula) - declared
            if undeclared:
                raise TheoryError(f"{ax.label}: undeclared constants {sorted(undeclared)}")

    @property
    def labels(self):
        return [a.label for a in self.axioms]

    def __getitem__(self, label) -> Axiom:
        for a in self.axioms:
            if a.label == label:
                return a
        raise KeyError(label)

    def uc_instances(self):
        return [a for a in self.axioms if a.kind == "uc"]

    def extend(self, *axioms, constants=(), name=None) -> "TheoryFragment":
        new_consts = list(self.constants) + [c for c in constants if c not in self.constants]
        return TheoryFragment(name or self.name, tuple(new_consts), self.axioms + tuple(axioms))

    def restrict(self, labels, name=None) -> "TheoryFragment":
        keep = set(labels)
        return TheoryFragment(name or self.name, self.constants,
                              tuple(a for a in self.axioms if a.label in keep))

    def rename(self, name) -> "TheoryFragment":
        return replace(self, name=name)

    def to_nst(self) -> str:
        lines = [f"# fragment: {self.name}"]
        if self.constants:
            lines.append(f"# constants: {' '.join(self.constants)}")
        for a in self.axioms:
            tag = f"{a.label} : {a.kind}" + (f" {a.main}" if a.main else "")
            lines.append(f"[{tag}] {render(a.formula)}")
        return "\n".join(lines) + "\n"


def make_axiom(label, formula, kind=None, main=None) -> Axiom:
    if kind is None:
        kind = "uc" if classify_uc(formula) is not None else "axiom"
    return Axiom(label, formula, kind, main)


_TAG = re.compile(r"^\[\s*([^\]\s:]+)\s*(?::\s*(\w+)\s*([^\]\s]+)?\s*)?\]\s*")


def parse_nst(text: str, name: str = "theory", constants=()) -> TheoryFragment:
    consts = list(constants)
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            m = re.match(r"#\s*(constants|fragment)\s*:\s*(.*)$", stripped)
            if m and m.group(1) == "constants":
                consts.extend(c for c in re.split(r"[\s,]+", m.group(2).strip()) if c and c not in consts)
            elif m:
                name = m.group(2).strip() or name
            continue
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        rows.append((lineno, body))
    axioms = []
    for k, (lineno, body) in enumerate(rows, 1):
        label, kind, main = f"ax{k}", None, None
        m = _TAG.match(body.strip())
        offset = len(body) - len(body.lstrip())
        if m:
            label, kind, main = m.group(1), m.group(2), m.group(3)
            offset += m.end()
        try:
            f = parse(body.strip()[m.end():] if m else body, consts)
        except syntax.ParseError as e:
            col = e.column + (offset if m else 0)
            raise syntax.ParseError(e.message, lineno, col, e.expected) from None
        axioms.append(make_axiom(label, f, kind, main))
    return TheoryFragment(name, tuple(consts), tuple(axioms))


def load_nst(path, constants=()) -> TheoryFragment:
    p = Path(path)
    return parse_nst(p.read_text(encoding="utf-8"), name=p.stem, constants=constants)
