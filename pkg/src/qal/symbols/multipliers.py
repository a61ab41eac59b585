"""Exact rational evaluation of the normal-form multiplier symbols.

Each symbol is a ratio of integer polynomials in the tuple entries, gated by
characteristic functions: a large-phase indicator and, for the resonant
variants, the constraint that one entry equals the output frequency
n = sum(n_i).  Values are exact fractions; indicators that fail yield an
exact zero with ``indicator_active = False``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .phases import phase_is_large, phi2_factored, phi3_factored, validate_tuple


class SymbolDomainError(ValueError):
    """A structural denominator vanished: the tuple is outside the symbol's
    admissible region."""


@dataclass(frozen=True)
class SymbolValue:
    value: Fraction
    indicator_active: bool


_ZERO = SymbolValue(Fraction(0), False)

SYMBOL_ARITY = {
    "m_r1": 2,
    "m_r2": 3,
    "m_d1": 4,
    "m_d2": 4,
    "m_a1": 4,
    "m_a2": 4,
    "m_b3": 4,
    "m_b4": 4,
    "psi": 4,
    "m_a_ell": 5,
    "h": 5,
}


def _phi_any(entries: tuple[int, ...]) -> int:
    """Phase of a tuple that may contain zero partial sums."""
    return sum(entries) ** 5 - sum(n**5 for n in entries)


def raw_r1(n1: int, n2: int) -> tuple[int, int]:
    den = phi2_factored(n1, n2)
    if den == 0:
        raise SymbolDomainError(f"quadratic phase vanishes at ({n1}, {n2})")
    return (n1 + n2) * (n1 * n1 + n2 * n2), den


def raw_r2(n1: int, n2: int, n3: int) -> tuple[int, int] | None:
    if not phase_is_large((n1, n2, n3)):
        return None
    s23 = n2 + n3
    n = n1 + s23
    d1 = phi2_factored(n1, s23)
    if d1 == 0:
        raise SymbolDomainError(f"quadratic phase vanishes at ({n1}, {s23})")
    d2 = phi3_factored(n1, n2, n3)
    num = n * (n1 * n1 + s23 * s23) * s23 * (n2 * n2 + n3 * n3)
    return num, d1 * d2


def raw_d1(n1: int, n2: int, n3: int, n4: int) -> tuple[int, int] | None:
    a = n1 + n2
    b = n3 + n4
    n = a + b
    if not phase_is_large((a, n3, n4)):
        return None
    d1 = phi2_factored(a, b)
    if d1 == 0:
        raise SymbolDomainError(
            f"quadratic phase vanishes at merged pair ({a}, {b})"
        )
    d2 = phi3_factored(a, n3, n4)
    num = n * (a * a + b * b) * b * (n3 * n3 + n4 * n4) * a * (n1 * n1 + n2 * n2)
    return num, d1 * d2


def raw_d2(n1: int, n2: int, n3: int, n4: int) -> tuple[int, int] | None:
    s234 = n2 + n3 + n4
    s34 = n3 + n4
    n = n1 + s234
    if not phase_is_large((n1, n2, s34)):
        return None
    d1 = phi2_factored(n1, s234)
    if d1 == 0:
        raise SymbolDomainError(f"quadratic phase vanishes at ({n1}, {s234})")
    d2 = phi3_factored(n1, n2, s34)
    num = (
        n
        * (n1 * n1 + s234 * s234)
        * s234
        * (n2 * n2 + s34 * s34)
        * s34
        * (n3 * n3 + n4 * n4)
    )
    return num, d1 * d2


def raw_psi(t: tuple[int, int, int, int], j: int = 4) -> tuple[int, int]:
    if j not in (3, 4):
        raise ValueError(f"psi partner index must be 3 or 4, got {j}")
    n = sum(t)
    nj = t[j - 1]
    return n + 3 * t[1] + 6 * nj, 25 * t[0] * nj


def raw_a_ell(t: tuple[int, ...], ell: int) -> tuple[int, int] | None:
    """Quintic cascade symbol: the quartic symbol on the tuple with slots
    ell, ell+1 merged, times the substituted pair factor over the merged
    quartic phase."""
    if not 1 <= ell <= 4:
        raise ValueError(f"ell must be in 1..4, got {ell}")
    merged = t[: ell - 1] + (t[ell - 1] + t[ell],) + t[ell + 1 :]
    if not phase_is_large(merged):
        return None
    base = raw_d2(*merged)
    if base is None:
        return None
    d4 = _phi_any(merged)
    pair_sum = t[ell - 1] + t[ell]
    num = base[0] * pair_sum * (t[ell - 1] ** 2 + t[ell] ** 2)
    return num, base[1] * d4


def raw_h(t: tuple[int, ...], ell: int, j: int) -> int:
    """Leading resonant denominator 125 n^12 (...)(...)(...) for the
    resonance n_{ell+j-1} = n inside the quintic cascade."""
    if ell not in (3, 4) or j not in (1, 2):
        raise ValueError(f"need ell in {{3,4}} and j in {{1,2}}, got ({ell}, {j})")
    if ell + j > 5:
        raise ValueError("index ell+j exceeds the tuple length")
    n = sum(t)
    r0 = ell + j - 1
    f1 = sum(t[r - 1] for r in range(2, 6) if r != r0)
    f2 = sum(t[r - 1] for r in range(3, 6) if r != r0)
    f3 = t[r0 - 1] + t[r0] - n
    return 125 * n**12 * f1 * f2 * f3


def eval_symbol(
    symbol_id: str,
    t: tuple[int, ...],
    ell: int | None = None,
    j: int | None = None,
) -> SymbolValue:
    """Evaluate a multiplier symbol exactly on a concrete frequency tuple.

    Raises SymbolDomainError when a structural denominator vanishes while
    the indicators fire, and ValueError on arity mismatch.
    """
    if symbol_id not in SYMBOL_ARITY:
        raise ValueError(f"unknown symbol {symbol_id!r}")
    arity = SYMBOL_ARITY[symbol_id]
    t = validate_tuple(t, min_len=arity)
    if len(t) != arity:
        raise ValueError(
            f"{symbol_id} expects a {arity}-tuple, got {len(t)} entries"
        )
    n = sum(t)

    if symbol_id == "m_r1":
        num, den = raw_r1(*t)
        return SymbolValue(Fraction(num, den), True)

    if symbol_id == "m_r2":
        raw = raw_r2(*t)
        return _ZERO if raw is None else SymbolValue(Fraction(*raw), True)

    if symbol_id in ("m_d1", "m_d2"):
        raw = raw_d1(*t) if symbol_id == "m_d1" else raw_d2(*t)
        return _ZERO if raw is None else SymbolValue(Fraction(*raw), True)

    if symbol_id in ("m_a1", "m_a2", "m_b3", "m_b4"):
        i = int(symbol_id[-1])
        if t[i - 1] != n:
            return _ZERO
        raw = raw_d1(*t) if symbol_id in ("m_a1", "m_a2") else raw_d2(*t)
        return _ZERO if raw is None else SymbolValue(Fraction(*raw), True)

    if symbol_id == "psi":
        num, den = raw_psi(t, j=4 if j is None else j)
        return SymbolValue(Fraction(num, den), True)

    if symbol_id == "m_a_ell":
        if ell is None:
            raise ValueError("m_a_ell requires the merge index ell")
        raw = raw_a_ell(t, ell)
        return _ZERO if raw is None else SymbolValue(Fraction(*raw), True)

    # symbol_id == "h"
    if ell is None or j is None:
        raise ValueError("h requires both indices ell and j")
    return SymbolValue(Fraction(raw_h(t, ell, j)), True)


def verify_resonant_reduction(n: int, n3: int) -> tuple[Fraction, Fraction]:
    """Both displayed forms of the resonant trilinear multiplier (modulo the
    common prefactor): the compact ratio and its four-term expansion.

    Contract: the two returned fractions are equal exactly.
    """
    if n == 0 or n3 == 0 or n + n3 == 0:
        raise ValueError(f"degenerate pair ({n}, {n3})")
    q = n * n + n3 * n3 + (n + n3) ** 2
    lhs = Fraction((n3 * n3 + (n + n3) ** 2) * (n * n + n3 * n3), n3 * q)
    rhs = (
        Fraction(n * n + n3 * n3, n3)
        - Fraction(n * n, 2 * n3)
        + Fraction(n, 2)
        - Fraction(n * n * n3 + n * n3 * n3, q)
    )
    return lhs, rhs


def verify_re1_combination(n: int, n3: int) -> tuple[Fraction, Fraction]:
    """The two-signs combination identity for the first resonant operator:
    the difference of the single-sign terms against the closed form
    -4 n^3 n3^2 / (product of the two quadratics).

    Contract: the two returned fractions are equal exactly.
    """
    if n == 0 or n3 == 0:
        raise ValueError(f"frequencies must be nonzero, got ({n}, {n3})")
    dplus = n * n + (n + n3) ** 2 + n3 * n3
    dminus = n * n + (n - n3) ** 2 + n3 * n3
    lhs = Fraction(n * n * n3, dplus) - Fraction(n * n * n3, dminus)
    rhs = Fraction(-4 * n**3 * n3 * n3, dplus * dminus)
    return lhs, rhs
