"""First-order formulas over membership and equality.

Terms are variables, constants, the composite sugar ``upair(a,b)``,
``opair(a,b)`` and ``extr(a)``, and (internally, for the refuter) Skolem
applications ``App``.  Formulas are immutable dataclasses, so structural
equality and hashing come for free.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Union


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class UPair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class OPair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Extr:
    arg: "Term"


@dataclass(frozen=True)
class App:
    """Skolem function application; never produced by the parser."""
    fn: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Union[Var, Const, UPair, OPair, Extr, App]
COMPOSITES = (UPair, OPair, Extr)


# --------------------------------------------------------------------------
# Formulas
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Mem:
    left: Term
    right: Term


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Mem, Eq, Not, And, Or, Implies, Iff, Forall, Exists]
ATOMS = (Mem, Eq)
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Forall, Exists)


def conj(*parts):
    """Left-nested conjunction of one or more formulas."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def term_args(t) -> tuple:
    if isinstance(t, (UPair, OPair)):
        return (t.left, t.right)
    if isinstance(t, Extr):
        return (t.arg,)
    if isinstance(t, App):
        return t.args
    return ()


def rebuild_term(t, args):
    if isinstance(t, UPair):
        return UPair(*args)
    if isinstance(t, OPair):
        return OPair(*args)
    if isinstance(t, Extr):
        return Extr(*args)
    if isinstance(t, App):
        return App(t.fn, tuple(args))
    return t


def term_vars(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in term_args(t):
        out |= term_vars(a)
    return out


def has_composite(t) -> bool:
    if isinstance(t, COMPOSITES):
        return True
    return any(has_composite(a) for a in term_args(t))


# --------------------------------------------------------------------------
# Traversal helpers
# --------------------------------------------------------------------------

def free_vars(f) -> frozenset:
    """Free variables of a formula (names only; constants are excluded)."""
    if isinstance(f, ATOMS):
        return frozenset(term_vars(f.left) | term_vars(f.right))
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f) -> set:
    """Every variable name occurring in f, bound or free."""
    if isinstance(f, ATOMS):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return all_vars(f.arg)
    if isinstance(f, BINARY):
        return all_vars(f.left) | all_vars(f.right)
    if isinstance(f, QUANTIFIERS):
        return all_vars(f.body) | {f.var}
    raise TypeError(f"not a formula: {f!r}")


def term_consts(t) -> set:
    if isinstance(t, Const):
        return {t.name}
    out = set()
    for a in term_args(t):
        out |= term_consts(a)
    return out


def constants(f) -> set:
    if isinstance(f, ATOMS):
        return term_consts(f.left) | term_consts(f.right)
    if isinstance(f, Not):
        return constants(f.arg)
    if isinstance(f, BINARY):
        return constants(f.left) | constants(f.right)
    return constants(f.body)


def atoms(f) -> Iterator:
    if isinstance(f, ATOMS):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.arg)
    elif isinstance(f, BINARY):
        yield from atoms(f.left)
        yield from atoms(f.right)
    else:
        yield from atoms(f.body)


def is_composite_free(f) -> bool:
    return not any(has_composite(a.left) or has_composite(a.right) for a in atoms(f))


def depth(f) -> int:
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return 1 + depth(f.arg)
    if isinstance(f, BINARY):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.body)


def fresh_name(base: str, used: set) -> str:
    """`base` itself if unused, else the first of base0, base1, ... not in `used`."""
    if base not in used:
        return base
    k = 0
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"


# --------------------------------------------------------------------------
# Substitution
# --------------------------------------------------------------------------

def subst_term(t, v: str, s):
    if isinstance(t, Var):
        return s if t.name == v else t
    args = term_args(t)
    if not args:
        return t
    return rebuild_term(t, [subst_term(a, v, s) for a in args])


def substitute(f, v: str, t):
    """Capture-avoiding substitution of term `t` for free variable `v`.

    A binder that would capture a variable of `t` is renamed to the first
    unused name of the form ``<binder>0``, ``<binder>1``, ...
    """
    tv = term_vars(t)
    return _subst(f, v, t, tv)


def _subst(f, v, t, tv):
    if isinstance(f, Mem):
        return Mem(subst_term(f.left, v, t), subst_term(f.right, v, t))
    if isinstance(f, Eq):
        return Eq(subst_term(f.left, v, t), subst_term(f.right, v, t))
    if isinstance(f, Not):
        return Not(_subst(f.arg, v, t, tv))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, v, t, tv), _subst(f.right, v, t, tv))
    # quantifier
    if f.var == v or v not in free_vars(f.body):
        return f
    var, body = f.var, f.body
    if var in tv:
        new = fresh_name(var, tv | all_vars(body) | {v})
        body = _subst(body, var, Var(new), {new})
        var = new
    return type(f)(var, _subst(body, v, t, tv))


def subst_many(f, mapping: dict):
    """Simultaneous-looking substitution done sequentially through fresh names."""
    if not mapping:
        return f
    used = all_vars(f) | set().union(*(term_vars(t) for t in mapping.values())) | set(mapping)
    temps = {}
    for v in mapping:
        tmp = fresh_name("_t", used)
        used.add(tmp)
        temps[v] = tmp
        f = substitute(f, v, Var(tmp))
    for v, t in mapping.items():
        f = substitute(f, temps[v], t)
    return f


def alpha_equivalent(f, g) -> bool:
    return _alpha(f, g, {}, {}, [0])


def _alpha(f, g, env_f, env_g, ctr):
    if type(f) is not type(g):
        return False
    if isinstance(f, ATOMS):
        return (_alpha_term(f.left, g.left, env_f, env_g)
                and _alpha_term(f.right, g.right, env_f, env_g))
    if isinstance(f, Not):
        return _alpha(f.arg, g.arg, env_f, env_g, ctr)
    if isinstance(f, BINARY):
        return (_alpha(f.left, g.left, env_f, env_g, ctr)
                and _alpha(f.right, g.right, env_f, env_g, ctr))
    ctr[0] += 1
    level = ctr[0]
    return _alpha(f.body, g.body, {**env_f, f.var: level}, {**env_g, g.var: level}, ctr)


def _alpha_term(s, t, env_s, env_t):
    if isinstance(s, Var) and isinstance(t, Var):
        bs, bt = env_s.get(s.name), env_t.get(t.name)
        if bs is None and bt is None:
            return s.name == t.name
        return bs == bt
    if type(s) is not type(t):
        return False
    if isinstance(s, Const):
        return s.name == t.name
    if isinstance(s, App) and s.fn != t.fn:
        return False
    sa, ta = term_args(s), term_args(t)
    return len(sa) == len(ta) and all(_alpha_term(a, b, env_s, env_t) for a, b in zip(sa, ta))


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

KEYWORDS = {"forall", "exists", "not", "and", "or", "in", "notin", "sub",
            "upair", "opair", "extr"}

# `-` may appear inside identifiers except where it starts `->`.
_IDENT = r"[A-Za-z_](?:[A-Za-z0-9_+']|-(?!>))*"
_TOKEN_RE = re.compile(
    rf"(?P<ws>[ \t\r\n]+)|(?P<op><->|->|!=|=|\(|\)|\.|,)|(?P<ident>{_IDENT})|(?P<bad>.)"
)


class ParseError(ValueError):
    def __init__(self, message, line, column, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        exp = f"; expected one of: {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{exp}")


class Token(NamedTuple):
    kind: str  # 'op', 'kw', 'ident', 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        col = m.start() - line_start + 1
        kind = m.lastgroup
        s = m.group()
        if kind == "ws":
            nl = s.count("\n")
            if nl:
                line += nl
                line_start = m.start() + s.rindex("\n") + 1
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {s!r}", line, col)
        if kind == "ident" and s in KEYWORDS:
            kind = "kw"
        tokens.append(Token(kind, s, line, col))
    col = len(text) - line_start + 1
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text, constants):
        self.toks = tokenize(text)
        self.i = 0
        self.constants = frozenset(constants)

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, expected):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.line, t.column, expected)

    def accept(self, text):
        if self.tok.kind in ("op", "kw") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.error({text})

    def ident(self):
        t = self.tok
        if t.kind != "ident":
            self.error({"identifier"})
        self.i += 1
        return t

    def parse(self):
        f = self.iff()
        if self.tok.kind != "eof":
            self.error({"<->", "->", "or", "and", "end of input"})
        return f

    def iff(self):
        left = self.imp()
        if self.accept("<->"):
            return Iff(left, self.iff())
        return left

    def imp(self):
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.imp())
        return left

    def disj(self):
        f = self.conj()
        while self.accept("or"):
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.accept("and"):
            f = And(f, self.unary())
        return f

    def unary(self):
        if self.accept("not"):
            return Not(self.unary())
        for q, cls in (("forall", Forall), ("exists", Exists)):
            if self.accept(q):
                t = self.ident()
                if t.text in self.constants:
                    raise ParseError(f"cannot bind declared constant {t.text!r}", t.line, t.column)
                self.expect(".")
                return cls(t.text, self.iff())
        if self.accept("("):
            f = self.iff()
            self.expect(")")
            return f
        return self.atom()

    def atom(self):
        left = self.term()
        for op in ("in", "notin", "=", "!=", "sub"):
            if self.accept(op):
                right = self.term()
                break
        else:
            self.error({"in", "notin", "=", "!=", "sub"})
        if op == "in":
            return Mem(left, right)
        if op == "notin":
            return Not(Mem(left, right))
        if op == "=":
            return Eq(left, right)
        if op == "!=":
            return Not(Eq(left, right))
        z = fresh_name("z", term_vars(left) | term_vars(right))
        return Forall(z, Implies(Mem(Var(z), left), Mem(Var(z), right)))

    def term(self):
        t = self.tok
        if t.kind == "kw" and t.text in ("upair", "opair", "extr"):
            self.i += 1
            self.expect("(")
            a = self.term()
            if t.text == "extr":
                self.expect(")")
                return Extr(a)
            self.expect(",")
            b = self.term()
            self.expect(")")
            return UPair(a, b) if t.text == "upair" else OPair(a, b)
        if t.kind != "ident":
            self.error({"identifier", "upair", "opair", "extr", "(", "not", "forall", "exists"})
        self.i += 1
        return Const(t.text) if t.text in self.constants else Var(t.text)


def parse(text: str, constants=()) -> "Formula":
    """Parse one formula.  Identifiers listed in `constants` become `Const`."""
    return _Parser(text, constants).parse()


def parse_term(text: str, constants=()):
    p = _Parser(text, constants)
    t = p.term()
    if p.tok.kind != "eof":
        p.error({"end of input"})
    return t


# --------------------------------------------------------------------------
# Rendering
# --------------------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<->", Implies: "->", Or: "or", And: "and"}
_RIGHT_ASSOC = (Iff, Implies)


def render_term(t) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, UPair):
        return f"upair({render_term(t.left)},{render_term(t.right)})"
    if isinstance(t, OPair):
        return f"opair({render_term(t.left)},{render_term(t.right)})"
    if isinstance(t, Extr):
        return f"extr({render_term(t.arg)})"
    if isinstance(t, App):
        if not t.args:
            return t.fn
        return f"{t.fn}({','.join(render_term(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def render(f) -> str:
    """Render with the fewest parentheses that still re-parse to `f`.

    A quantifier used as an operand is parenthesised unless it is the last
    thing in its enclosing context.  For readability a binary connective
    directly under a quantifier or under ``<->`` is wrapped too.
    """
    return _render(f, True)


def _render(f, tail):
    if isinstance(f, Mem):
        return f"{render_term(f.left)} in {render_term(f.right)}"
    if isinstance(f, Eq):
        return f"{render_term(f.left)} = {render_term(f.right)}"
    if isinstance(f, Not):
        inner = _render(f.arg, True)
        if isinstance(f.arg, BINARY + QUANTIFIERS):
            inner = f"({inner})"
        return f"not {inner}"
    if isinstance(f, QUANTIFIERS):
        q = "forall" if isinstance(f, Forall) else "exists"
        if isinstance(f.body, BINARY):
            return f"{q} {f.var}. ({_render(f.body, True)})"
        return f"{q} {f.var}. {_render(f.body, tail)}"
    p = _PREC[type(f)]
    right_assoc = isinstance(f, _RIGHT_ASSOC)
    return (f"{_operand(f.left, p, right_assoc, False)} {_OPS[type(f)]} "
            f"{_operand(f.right, p, not right_assoc, tail)}")


def _operand(g, p, wrap_equal, tail):
    if isinstance(g, QUANTIFIERS):
        return _render(g, True) if tail else f"({_render(g, True)})"
    if isinstance(g, BINARY):
        q = _PREC[type(g)]
        if p == _PREC[Iff] or q < p or (q == p and wrap_equal):
            return f"({_render(g, True)})"
    return _render(g, tail)


# --------------------------------------------------------------------------
# Abbreviation expansion
# --------------------------------------------------------------------------

def _innermost_composite(t):
    """Leftmost composite of `t` whose own arguments are composite-free."""
    for a in term_args(t):
        c = _innermost_composite(a)
        if c is not None:
            return c
    return t if isinstance(t, COMPOSITES) else None


def _replace_term(t, target, new):
    if t == target:
        return new
    args = term_args(t)
    if not args:
        return t
    return rebuild_term(t, [_replace_term(a, target, new) for a in args])


def _replace_first(t, target, new, done):
    """Replace only the first (leftmost) occurrence of `target`."""
    if done[0]:
        return t
    if t == target:
        done[0] = True
        return new
    args = term_args(t)
    if not args:
        return t
    return rebuild_term(t, [_replace_first(a, target, new, done) for a in args])


def composite_definition(c, y: str, used: set):
    """Formula stating that variable `y` denotes the composite `c`."""
    x = fresh_name("x", used)
    used.add(x)
    X, Y = Var(x), Var(y)
    if isinstance(c, UPair):
        body = Or(Eq(X, c.left), Eq(X, c.right))
    elif isinstance(c, OPair):
        a, b = c.left, c.right
        body = Or(Eq(X, UPair(a, a)), Eq(X, UPair(a, b)))
    elif isinstance(c, Extr):
        z = fresh_name("z", used)
        used.add(z)
        a = c.arg
        body = Exists(z, And(Eq(Var(z), OPair(a, X)), Mem(Var(z), a)))
    else:
        raise TypeError(f"not a composite: {c!r}")
    return Forall(x, Iff(Mem(X, Y), body))


def expand_once(f, used=None):
    """Eliminate the first composite occurrence of `f` (pre-order, leftmost-innermost).

    Returns f unchanged when it is composite-free.
    """
    if used is None:
        used = all_vars(f) | constants(f)
    done = [False]
    return _expand(f, used, recursive=False, done=done)


def expand(f):
    """Composite-free equivalent of `f` (given the denoted sets exist)."""
    if is_composite_free(f):
        return f
    used = all_vars(f) | constants(f)
    return _expand(f, used, recursive=True, done=[False])


def _expand(f, used, recursive, done):
    if isinstance(f, ATOMS):
        if done[0]:
            return f
        c = _innermost_composite(f.left)
        if c is None:
            c = _innermost_composite(f.right)
        if c is None:
            return f
        y = fresh_name("y", used)
        used.add(y)
        definition = composite_definition(c, y, used)
        hit = [False]
        left = _replace_first(f.left, c, Var(y), hit)
        right = _replace_first(f.right, c, Var(y), hit)
        atom = type(f)(left, right)
        if not recursive:
            done[0] = True
            return Exists(y, And(definition, atom))
        return Exists(y, And(_expand(definition, used, True, done),
                             _expand(atom, used, True, done)))
    if isinstance(f, Not):
        return Not(_expand(f.arg, used, recursive, done))
    if isinstance(f, BINARY):
        left = _expand(f.left, used, recursive, done)
        return type(f)(left, _expand(f.right, used, recursive, done))
    return type(f)(f.var, _expand(f.body, used, recursive, done))


# --------------------------------------------------------------------------
# Comprehension instances
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class UcShape:
    main_var: str
    elem_var: str
    body: "Formula"
    self_referential: bool

    def reconstruct(self):
        x, y = Var(self.elem_var), Var(self.main_var)
        return Exists(self.main_var, Forall(self.elem_var, Iff(Mem(x, y), self.body)))


def classify_uc(f) -> Optional[UcShape]:
    """Shape of ``exists y. forall x. (x in y <-> body)``, or None."""
    if not (isinstance(f, Exists) and isinstance(f.body, Forall)):
        return None
    y, inner = f.var, f.body
    x = inner.var
    iff = inner.body
    if x == y or not isinstance(iff, Iff):
        return None
    head = iff.left
    if head != Mem(Var(x), Var(y)):
        return None
    return UcShape(y, x, iff.right, y in free_vars(iff.right))


def uc_instance(body, elem="x", main="y"):
    """Build ``exists main. forall elem. (elem in main <-> body)``."""
    return UcShape(main, elem, body, main in free_vars(body)).reconstruct()


def to_json(node):
    """Nested dict view of a term or formula: {"type": class name, field: value, ...}."""
    if isinstance(node, (str, int)):
        return node
    if isinstance(node, tuple):
        return [to_json(n) for n in node]
    out = {"type": type(node).__name__}
    for name in node.__dataclass_fields__:
        out[name] = to_json(getattr(node, name))
    return out
