"""Ground-instantiation refuter: clausification, SAT, certificates."""

from .certificate import Certificate, CheckResult, check_certificate
from .clausify import Clause, ClauseSet, ClausifyError, SkolemSymbol, clausify
from .engine import Bounds, HintError, RefutationOutcome, load_hints, refute
from .sat import SatResult, minimize_core, sat_solve

__all__ = [
    "Bounds", "Certificate", "CheckResult", "Clause", "ClauseSet", "ClausifyError", "HintError",
    "RefutationOutcome", "SatResult", "SkolemSymbol", "check_certificate", "clausify",
    "load_hints", "minimize_core", "refute", "sat_solve",
]
