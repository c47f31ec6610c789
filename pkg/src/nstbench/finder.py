"""Exhaustive search for finite extensional models.

Membership relations on ``{0..n-1}`` are enumerated as bitmaps whose most
significant bit is the pair (0, 0), followed by (0, 1), ... (n-1, n-1), so
numeric order is lexicographic order of the bit string.  Constant
assignments are not enumerated one by one: constants are left as free
axes in the relational evaluator and the least satisfying assignment is
read off the resulting tensor.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .semantics import EvalReport, FiniteModel, RelationalEvaluator, check_theory
from .syntax import Not, expand
from .theory import TheoryFragment, make_axiom

CHUNK = 1 << 14


@dataclass(frozen=True)
class SearchBudget:
    max_size: int = 4
    max_constant_assignments: int = 1 << 20
    time_limit: Optional[float] = None
    canonical_only: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")


class SearchTimeout(RuntimeError):
    pass


@dataclass
class SearchResult:
    status: str                      # "found" | "exhausted" | "timeout"
    model: Optional[FiniteModel] = None
    report: Optional[EvalReport] = None
    stats: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == "found"

    def __bool__(self):
        return self.found

    def to_json(self):
        out = {"status": self.status, "stats": self.stats}
        if self.model is not None:
            out["model"] = self.model.to_json()
            out["report"] = self.report.to_json()
        return out


# --------------------------------------------------------------------------
# Enumeration
# --------------------------------------------------------------------------

def _weights(n):
    # bit weight of pair index i = a*n + b; pair (0,0) is the most significant
    return np.array([1 << (n * n - 1 - i) for i in range(n * n)], dtype=np.int64)


def bitmap_of(matrix) -> int:
    m = np.asarray(matrix, dtype=bool)
    n = m.shape[0]
    return int(m.reshape(-1).astype(np.int64) @ _weights(n))


def matrix_of(bitmap: int, n: int) -> np.ndarray:
    bits = [(bitmap >> (n * n - 1 - i)) & 1 for i in range(n * n)]
    return np.array(bits, dtype=bool).reshape(n, n)


def _bits(lo, hi, n):
    codes = np.arange(lo, hi, dtype=np.int64)
    shifts = np.array([n * n - 1 - i for i in range(n * n)], dtype=np.int64)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(bool)


def _extensional_mask(bits, n):
    mats = bits.reshape(-1, n, n)
    cols = (mats.astype(np.int64) * (1 << np.arange(n, dtype=np.int64))[None, :, None]).sum(axis=1)
    ok = np.ones(len(bits), dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            ok &= cols[:, a] != cols[:, b]
    return ok


def _canonical_mask(bits, n):
    """True where the bitmap is the least over all relabellings of the universe."""
    w = _weights(n)
    own = bits.astype(np.int64) @ w
    best = own.copy()
    for perm in itertools.permutations(range(n)):
        if perm == tuple(range(n)):
            continue
        # relabel a -> perm[a]: new[perm[a], perm[b]] = old[a, b]
        idx = np.empty(n * n, dtype=np.int64)
        for a in range(n):
            for b in range(n):
                idx[perm[a] * n + perm[b]] = a * n + b
        best = np.minimum(best, bits[:, idx].astype(np.int64) @ w)
    return own == best


def canonical_bitmap(matrix) -> int:
    m = np.asarray(matrix, dtype=bool)
    n = m.shape[0]
    best = None
    for perm in itertools.permutations(range(n)):
        new = np.zeros_like(m)
        for a in range(n):
            for b in range(n):
                new[perm[a], perm[b]] = m[a, b]
        code = bitmap_of(new)
        best = code if best is None else min(best, code)
    return best


def _candidates(n, lo, hi, extensional_only, canonical_only):
    """Bitmaps in [lo, hi) passing the filters, ascending."""
    bits = _bits(lo, hi, n)
    mask = np.ones(len(bits), dtype=bool)
    if extensional_only:
        mask &= _extensional_mask(bits, n)
    if canonical_only:
        sel = np.nonzero(mask)[0]
        if len(sel):
            mask[sel] = _canonical_mask(bits[sel], n)
    codes = np.arange(lo, hi, dtype=np.int64)[mask]
    return codes, bits[mask]


def enumerate_models(size: int, extensional_only: bool = True, canonical_only: bool = False):
    """Yield membership structures of the given size in ascending bitmap order."""
    if size < 1:
        raise ValueError("size must be at least 1")
    total = 1 << (size * size)
    for lo in range(0, total, CHUNK):
        _, bits = _candidates(size, lo, min(total, lo + CHUNK), extensional_only, canonical_only)
        for row in bits:
            yield FiniteModel.from_matrix(row.reshape(size, size))


def count_models(size, extensional_only=True, canonical_only=False) -> int:
    total = 1 << (size * size)
    return sum(len(_candidates(size, lo, min(total, lo + CHUNK), extensional_only, canonical_only)[0])
               for lo in range(0, total, CHUNK))


# --------------------------------------------------------------------------
# Model search
# --------------------------------------------------------------------------

def _least_assignment(formulas, model, consts):
    """Least constant assignment (lexicographic, declared order) satisfying all formulas."""
    ev = RelationalEvaluator(model, {})
    acc = None
    names = ()
    for f in formulas:
        r = ev.relation(f, {})
        if not r.names:
            if not bool(r.data):
                return None
            continue
        if acc is None:
            names, acc = r.names, r.data
        else:
            merged = tuple(sorted(set(names) | set(r.names)))
            a = _align(names, acc, merged)
            b = _align(r.names, r.data, merged)
            names, acc = merged, np.logical_and(a, b)
        if not acc.any():
            return None
    keys = ["@" + c for c in consts]
    if acc is None:
        return {c: 0 for c in consts}
    # order axes by declaration, append singleton axes for unused constants
    sk = tuple(sorted(keys))
    full = np.transpose(_align(names, acc, sk), [sk.index(k) for k in keys])
    full = np.broadcast_to(full, (model.size,) * len(keys))
    flat = int(np.argmax(full.reshape(-1)))
    idx = np.unravel_index(flat, full.shape)
    return {c: int(i) for c, i in zip(consts, idx)}


def _align(names, data, target):
    shape = [data.shape[names.index(n)] if n in names else 1 for n in target]
    return data.reshape(shape)


def _search_range(formulas, consts, n, lo, hi, canonical, deadline):
    codes, bits = _candidates(n, lo, hi, True, canonical)
    checked = 0
    for code, row in zip(codes, bits):
        if deadline is not None and time.monotonic() > deadline:
            return None, checked, True
        checked += 1
        model = FiniteModel.from_matrix(row.reshape(n, n))
        assign = _least_assignment(formulas, model, consts)
        if assign is not None:
            return (int(code), assign), checked, False
    return None, checked, False


def _search_range_job(args):
    return _search_range(*args)


def find_model(theory: TheoryFragment, budget: SearchBudget = SearchBudget()) -> SearchResult:
    """Least extensional model of `theory` (by size, bitmap, then constants)."""
    t0 = time.monotonic()
    deadline = None if budget.time_limit is None else t0 + budget.time_limit
    formulas = [expand(a.formula) for a in theory.axioms]
    consts = tuple(theory.constants)
    stats = {"models_checked": 0, "sizes": []}
    for n in range(1, budget.max_size + 1):
        if n ** len(consts) > budget.max_constant_assignments:
            stats.setdefault("skipped_sizes", []).append(n)
            continue
        total = 1 << (n * n)
        ranges = [(lo, min(total, lo + CHUNK)) for lo in range(0, total, CHUNK)]
        hit, timed_out = None, False
        if budget.workers > 1 and len(ranges) > 1:
            jobs = [(formulas, consts, n, lo, hi, budget.canonical_only, deadline) for lo, hi in ranges]
            with ProcessPoolExecutor(max_workers=budget.workers) as pool:
                results = list(pool.map(_search_range_job, jobs))
            for found, checked, to in results:
                stats["models_checked"] += checked
                timed_out = timed_out or to
                if found is not None and hit is None:
                    hit = found
        else:
            for lo, hi in ranges:
                found, checked, to = _search_range(formulas, consts, n, lo, hi,
                                                   budget.canonical_only, deadline)
                stats["models_checked"] += checked
                if to:
                    timed_out = True
                    break
                if found is not None:
                    hit = found
                    break
        stats["sizes"].append(n)
        if hit is not None:
            code, assign = hit
            model = FiniteModel.from_matrix(matrix_of(code, n), assign)
            report = check_theory(model, theory)
            stats["seconds"] = round(time.monotonic() - t0, 6)
            return SearchResult("found", model, report, stats)
        if timed_out:
            stats["seconds"] = round(time.monotonic() - t0, 6)
            return SearchResult("timeout", stats=stats)
    stats["seconds"] = round(time.monotonic() - t0, 6)
    return SearchResult("exhausted", stats=stats)


# --------------------------------------------------------------------------
# Independence
# --------------------------------------------------------------------------

@dataclass
class IndependenceVerdict:
    status: str        # Independent | DecidedPositive | DecidedNegative | TheoryInconsistent | Unknown
    pos_model: Optional[FiniteModel] = None
    neg_model: Optional[FiniteModel] = None
    certificate: object = None
    notes: list = field(default_factory=list)

    def to_json(self):
        out = {"status": self.status, "notes": self.notes}
        if self.pos_model is not None:
            out["pos_model"] = self.pos_model.to_json()
        if self.neg_model is not None:
            out["neg_model"] = self.neg_model.to_json()
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


class CrossCheckError(RuntimeError):
    """The refuter and the model finder disagree: one of them is unsound."""


def independence(theory: TheoryFragment, phi, budget: SearchBudget = SearchBudget(),
                 refute_bounds=None, cross_check: bool = True) -> IndependenceVerdict:
    from .refuter import Bounds, refute

    bounds = refute_bounds or Bounds()
    pos_t = theory.extend(make_axiom("phi", phi, "axiom"), name=f"{theory.name}+phi")
    neg_t = theory.extend(make_axiom("not_phi", Not(phi), "axiom"), name=f"{theory.name}+not_phi")
    pos = find_model(pos_t, budget)
    neg = find_model(neg_t, budget)
    notes = [f"phi side: {pos.status}", f"not-phi side: {neg.status}"]

    def check_no_refutation(t, side):
        if not cross_check:
            return
        out = refute(t, bounds)
        if out.unsat:
            raise CrossCheckError(f"{side}: refuted although a model exists")

    if pos.found and neg.found:
        check_no_refutation(pos_t, "phi")
        check_no_refutation(neg_t, "not phi")
        return IndependenceVerdict("Independent", pos.model, neg.model, notes=notes)
    if pos.found:
        check_no_refutation(pos_t, "phi")
        out = refute(neg_t, bounds)
        if out.unsat:
            return IndependenceVerdict("DecidedPositive", pos_model=pos.model,
                                       certificate=out.certificate, notes=notes)
        notes.append(f"not-phi side unresolved: {out.reason}")
        return IndependenceVerdict("Unknown", pos_model=pos.model, notes=notes)
    if neg.found:
        check_no_refutation(neg_t, "not phi")
        out = refute(pos_t, bounds)
        if out.unsat:
            return IndependenceVerdict("DecidedNegative", neg_model=neg.model,
                                       certificate=out.certificate, notes=notes)
        notes.append(f"phi side unresolved: {out.reason}")
        return IndependenceVerdict("Unknown", neg_model=neg.model, notes=notes)
    out = refute(theory, bounds)
    if out.unsat:
        return IndependenceVerdict("TheoryInconsistent", certificate=out.certificate, notes=notes)
    notes.append("no model on either side within budget")
    return IndependenceVerdict("Unknown", notes=notes)
