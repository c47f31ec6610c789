"""Naive-set-theory workbench: formulas, finite models, model search and refutation."""

from .syntax import ParseError, expand, parse, render
from .theory import Axiom, TheoryFragment, load_nst, parse_nst
from .semantics import FiniteModel, check_theory, eval_formula
from .finder import SearchBudget, find_model, independence

__version__ = "0.1.0"

__all__ = [
    "Axiom", "FiniteModel", "ParseError", "SearchBudget", "TheoryFragment",
    "check_theory", "eval_formula", "expand", "find_model", "independence",
    "load_nst", "parse", "parse_nst", "render",
]
