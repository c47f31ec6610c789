"""Ground and template terms for the refuter.

A ground term is a tuple ``(fn, *args)``; constants are 1-tuples.  Clause
templates use plain ``str`` for variables.  Atoms are ``("in", s, t)`` or
``("=", s, t)``; ground equalities are oriented so that ``key(s) <= key(t)``.
"""

from __future__ import annotations

import re
from functools import lru_cache


@lru_cache(maxsize=None)
def render(t) -> str:
    if isinstance(t, str):
        return t
    if len(t) == 1:
        return t[0]
    return f"{t[0]}({','.join(render(a) for a in t[1:])})"


def depth(t) -> int:
    if isinstance(t, str) or len(t) == 1:
        return 1
    return 1 + max(depth(a) for a in t[1:])


def subterms(t):
    yield t
    if not isinstance(t, str):
        for a in t[1:]:
            yield from subterms(a)


def term_vars(t) -> list:
    if isinstance(t, str):
        return [t]
    out = []
    for a in t[1:]:
        for v in term_vars(a):
            if v not in out:
                out.append(v)
    return out


def instantiate(t, subst):
    if isinstance(t, str):
        return subst[t]
    if len(t) == 1:
        return t
    return (t[0],) + tuple(instantiate(a, subst) for a in t[1:])


def key(t):
    return render(t)


def orient(atom):
    if atom[0] == "=" and key(atom[1]) > key(atom[2]):
        return ("=", atom[2], atom[1])
    return atom


def render_atom(atom) -> str:
    op = "in" if atom[0] == "in" else "="
    return f"{render(atom[1])} {op} {render(atom[2])}"


def render_literal(lit) -> str:
    sign, atom = lit
    return ("" if sign else "-") + render_atom(atom)


_TOK = re.compile(r"\s*([(),]|[^(),\s]+)")


class TermSyntaxError(ValueError):
    pass


def parse_term(text: str):
    """Parse ``f(a,g(b))`` into a ground term tuple."""
    toks = _TOK.findall(text)
    pos = [0]

    def term():
        if pos[0] >= len(toks) or toks[pos[0]] in "(),":
            raise TermSyntaxError(f"bad term {text!r}")
        name = toks[pos[0]]
        pos[0] += 1
        if pos[0] < len(toks) and toks[pos[0]] == "(":
            pos[0] += 1
            args = [term()]
            while toks[pos[0]] == ",":
                pos[0] += 1
                args.append(term())
            if toks[pos[0]] != ")":
                raise TermSyntaxError(f"bad term {text!r}")
            pos[0] += 1
            return (name,) + tuple(args)
        return (name,)

    try:
        t = term()
    except IndexError:
        raise TermSyntaxError(f"bad term {text!r}") from None
    if pos[0] != len(toks):
        raise TermSyntaxError(f"trailing input in term {text!r}")
    return t


_ATOM = re.compile(r"^\s*(-?)\s*(.+?)\s+(in|=)\s+(.+?)\s*$")


def parse_literal(text: str):
    m = _ATOM.match(text)
    if not m:
        raise TermSyntaxError(f"bad literal {text!r}")
    atom = orient(("in" if m.group(3) == "in" else "=", parse_term(m.group(2)), parse_term(m.group(4))))
    return (m.group(1) != "-", atom)
