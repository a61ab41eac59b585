"""Exact integer phase calculus, resonance classification, multiplier
symbols, cancellation identities, and asymptotic bound sweeps.

Everything in this subpackage is exact: arbitrary-precision integers and
rationals only, no floating point.  An approximate zero proves nothing.
"""

from .phases import (
    Case,
    ResonanceCase,
    classify,
    phase_is_large,
    phi,
    phi2_factored,
    phi3_factored,
    telescope_decompose,
    validate_tuple,
)
from .multipliers import (
    SYMBOL_ARITY,
    SymbolDomainError,
    SymbolValue,
    eval_symbol,
    verify_re1_combination,
    verify_resonant_reduction,
)
from .cancellations import (
    KINDS,
    RationalField,
    break_one_mode,
    cancellation_control,
    cancellation_pieces,
    cancellation_sum,
    random_rational_field,
)
from .sweeps import BOUND_IDS, ShellMax, bound_ratio_sweep

__all__ = [
    "Case",
    "ResonanceCase",
    "classify",
    "phase_is_large",
    "phi",
    "phi2_factored",
    "phi3_factored",
    "telescope_decompose",
    "validate_tuple",
    "SYMBOL_ARITY",
    "SymbolDomainError",
    "SymbolValue",
    "eval_symbol",
    "verify_re1_combination",
    "verify_resonant_reduction",
    "KINDS",
    "RationalField",
    "break_one_mode",
    "cancellation_control",
    "cancellation_pieces",
    "cancellation_sum",
    "random_rational_field",
    "BOUND_IDS",
    "ShellMax",
    "bound_ratio_sweep",
]
