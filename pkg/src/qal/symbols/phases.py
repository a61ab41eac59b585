"""Integer phases of frequency tuples and their resonance classification.

The phase of a tuple (n_1, ..., n_p) of nonzero integers is the exact
integer (sum n_i)^5 - sum n_i^5.  Its zeros are the resonant interactions;
its size relative to the largest frequency drives every estimate downstream.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

# Threshold constant: a phase counts as "large" when |phase| >= (n_1*)^4 / C.
# The decomposition is valid for any fixed choice; it is recorded here once
# so sweeps are reproducible.  C = 4 keeps the near-resonant corner families
# admissible only below dyadic shell ~64, so the bound sweeps reach their
# asymptotic plateaus at desk scale (with C = 100 they saturate only near
# shell 2048).
LARGE_PHASE_DENOMINATOR = 4


def validate_tuple(t: tuple[int, ...], min_len: int = 2) -> tuple[int, ...]:
    t = tuple(int(n) for n in t)
    if len(t) < min_len:
        raise ValueError(f"need at least {min_len} frequencies, got {len(t)}")
    if any(n == 0 for n in t):
        raise ValueError(f"frequencies must be nonzero, got {t}")
    return t


def magnitudes_desc(t: tuple[int, ...]) -> list[int]:
    """Decreasing rearrangement of the entry magnitudes."""
    return sorted((abs(n) for n in t), reverse=True)


def phi(t: tuple[int, ...]) -> int:
    """Exact phase (sum n_i)^5 - sum n_i^5."""
    t = validate_tuple(t)
    return sum(t) ** 5 - sum(n**5 for n in t)


def phi2_factored(n1: int, n2: int) -> int:
    """Closed form (5/2) n n1 n2 (n^2 + n1^2 + n2^2) with n = n1 + n2."""
    n = n1 + n2
    x = n * n1 * n2 * (n * n + n1 * n1 + n2 * n2)
    value = Fraction(5 * x, 2)
    assert value.denominator == 1
    return int(value)


def phi3_factored(n1: int, n2: int, n3: int) -> int:
    """Closed form (5/2)(n1+n2)(n2+n3)(n1+n3)(n^2 + n1^2 + n2^2 + n3^2)."""
    n = n1 + n2 + n3
    x = (n1 + n2) * (n2 + n3) * (n1 + n3) * (n * n + n1 * n1 + n2 * n2 + n3 * n3)
    value = Fraction(5 * x, 2)
    assert value.denominator == 1
    return int(value)


def telescope_decompose(t: tuple[int, ...]) -> list[int]:
    """Split the phase of a p-tuple (p >= 4) into one cubic and p-3
    quadratic phases of partial sums.

    With tail sums s_i = n_i + ... + n_p the parts are
    phi3(n_1, n_2, s_3) and phi2(n_j, s_{j+1}) for j = 3..p-1; they sum
    exactly to phi(t).  Tuples whose tail sum s_3 vanishes are outside the
    domain (the partial sum must be a usable frequency).
    """
    t = validate_tuple(t, min_len=4)
    p = len(t)
    tails = [0] * (p + 1)
    for i in range(p - 1, -1, -1):
        tails[i] = tails[i + 1] + t[i]
    s3 = tails[2]
    if s3 == 0:
        raise ValueError(f"tail sum n_3 + ... + n_p vanishes for {t}")
    parts = [phi3_factored(t[0], t[1], s3)]
    for j in range(2, p - 1):
        parts.append(phi2_factored(t[j], tails[j + 1]))
    return parts


def phase_is_large(t: tuple[int, ...]) -> bool:
    """Whether |phi(t)| clears the large-phase threshold (n_1*)^4 / C
    (entries may include zero partial sums; the largest magnitude still
    sets the scale)."""
    entries = tuple(int(n) for n in t)
    m = max(abs(n) for n in entries)
    value = sum(entries) ** 5 - sum(n**5 for n in entries)
    return LARGE_PHASE_DENOMINATOR * abs(value) >= m**4


class Case(enum.Enum):
    RESONANT = "resonant"
    PAIR_CANCELLATION = "pair_cancellation"
    LARGE_PHASE = "large_phase"
    MID_CASCADE = "mid_cascade"


@dataclass(frozen=True)
class ResonanceCase:
    case: Case
    witness: int | None = None  # 1-based index with n_i = n, for RESONANT


def classify(t: tuple[int, ...]) -> ResonanceCase:
    """Disjoint classification of a tuple, in fixed priority order.

    1. RESONANT when some n_i equals the output frequency n = sum(t)
       (witness is the first such index).
    2. PAIR_CANCELLATION when p >= 4 and the two largest magnitudes cancel.
    3. LARGE_PHASE when |phi(t)| clears the large-phase threshold.
    4. MID_CASCADE otherwise; such tuples carry (n_3*)^4 n_4* comparable to
       (n_1*)^4, which is checked as a property, never assumed.
    """
    t = validate_tuple(t, min_len=3)
    n = sum(t)
    for i, ni in enumerate(t):
        if ni == n:
            return ResonanceCase(Case.RESONANT, witness=i + 1)
    m = max(abs(ni) for ni in t)
    if len(t) >= 4 and (m in t) and (-m in t):
        return ResonanceCase(Case.PAIR_CANCELLATION)
    if LARGE_PHASE_DENOMINATOR * abs(n**5 - sum(ni**5 for ni in t)) >= m**4:
        return ResonanceCase(Case.LARGE_PHASE)
    return ResonanceCase(Case.MID_CASCADE)
