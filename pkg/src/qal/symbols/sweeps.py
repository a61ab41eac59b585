"""Dyadic-shell maxima of |symbol| / bound-expression ratios.

For each bound the sweep walks tuples shell by shell (2^k <= n_1* < 2^{k+1})
and records the exact maximum ratio of the symbol against its claimed
asymptotic envelope.  Shell-to-shell stability of the maxima is the
numerical evidence that the implied constant is finite.

Shells are enumerated exhaustively when small enough; large shells combine
a deterministic enumeration of the extremal direction families (one or two
large entries, everything else small) with a seeded uniform top-up sample.
All arithmetic is exact; only the candidate generation is randomized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import chain, product

import numpy as np

from ..rng import seed_stream
from .multipliers import (
    SymbolDomainError,
    raw_a_ell,
    raw_d1,
    raw_d2,
    raw_psi,
)

BOUND_IDS = (
    "m_d1",
    "m_d2",
    "m_a1",
    "m_b3",
    "m_d1_pair",
    "m_d2_pair",
    "h31",
)

# Concrete stand-ins for the free constants: "much larger" means an 8x
# magnitude separation, and large shells are sampled with this budget.
SEPARATION = 8
DEFAULT_BUDGET = 10**6

_SMALL = 6  # |entry| cap for the small slots of structured families


@dataclass(frozen=True)
class ShellMax:
    shell_lo: int
    shell_hi: int  # inclusive
    max_ratio: Fraction | None
    argmax: tuple[int, ...] | None
    n_evaluated: int
    exhaustive: bool


def _second_magnitude(t: tuple[int, ...]) -> int:
    mags = sorted((abs(x) for x in t), reverse=True)
    return mags[1]


# ---------------------------------------------------------------------------
# ratio evaluators: return (ratio_num, ratio_den) in positive ints, or None
# when the tuple is inadmissible / the symbol vanishes


def _ratio_m_d1(t):
    try:
        raw = raw_d1(*t)
    except SymbolDomainError:
        return None
    if raw is None or raw[0] == 0:
        return None
    num, den = raw
    a = t[0] + t[1]
    bden = max(abs(a), abs(t[2]), abs(t[3])) ** 2
    bnum = max(t[0] * t[0], t[1] * t[1])
    return abs(num) * bden, abs(den) * bnum


def _ratio_m_d2(t):
    try:
        raw = raw_d2(*t)
    except SymbolDomainError:
        return None
    if raw is None or raw[0] == 0:
        return None
    num, den = raw
    bnum = max(t[2] * t[2], t[3] * t[3])
    bden = abs(t[0]) * max(abs(t[0]), abs(t[1]), abs(t[2] + t[3]))
    return abs(num) * bden, abs(den) * bnum


def _ratio_m_d1_pair(t):
    try:
        raw = raw_d1(*t)
    except SymbolDomainError:
        return None
    if raw is None or raw[0] == 0:
        return None
    return abs(raw[0]), abs(raw[1])


def _ratio_m_d2_pair(t):
    try:
        raw = raw_d2(*t)
    except SymbolDomainError:
        return None
    if raw is None or raw[0] == 0:
        return None
    return abs(raw[0]), abs(raw[1]) * _second_magnitude(t)


def _ratio_m_a1(t):
    # resonant quartic tuple: t[0] = n, remaining entries sum to zero
    try:
        raw = raw_d1(*t)
    except SymbolDomainError:
        return None
    if raw is None or raw[0] == 0:
        return None
    n = t[0]
    n2s = max(abs(t[1]), abs(t[2]), abs(t[3]))
    return abs(raw[0]) * abs(n), abs(raw[1]) * n2s


def _ratio_m_b3(t):
    # resonant quartic tuple: t[2] = n; symbol is m_b3 plus the affine
    # correction (n + n2 + 2 n4)/(25 n1 n4), against max(n2^2, n4^2)/|n|.
    # The affine coefficients come from expanding the phase product one
    # order past its leading term; the uncorrected pair (3 n2 + 6 n4)
    # leaves an O(1) residual and no finite constant.
    try:
        raw = raw_d2(*t)
    except SymbolDomainError:
        return None
    if raw is None:
        return None
    n1, n2, n, n4 = t
    pnum, pden = n + n2 + 2 * n4, 25 * n1 * n4
    num = raw[0] * pden + pnum * raw[1]
    den = raw[1] * pden
    if num == 0:
        return None
    bnum = max(n2 * n2, n4 * n4)
    return abs(num) * abs(n), abs(den) * bnum


def _ratio_h31(t):
    # resonant quintic tuple: t[2] = n; the cascade symbol against its
    # leading resonant form 1 / (125 n1 (n4+n5) n4), compared to n_2*/|n|.
    # (Leading denominator in sign-corrected, n^12-free form; the n^12 of
    # the full phase product cancels against the numerator.)
    try:
        raw = raw_a_ell(t, 3)
    except SymbolDomainError:
        return None
    if raw is None:
        return None
    n1, n2, n, n4, n5 = t
    happrox = 125 * n1 * (n4 + n5) * n4
    if happrox == 0:
        return None
    num = raw[0] * happrox - raw[1]
    den = raw[1] * happrox
    if num == 0:
        return None
    n2s = max(abs(n1), abs(n2), abs(n4), abs(n5))
    return abs(num) * abs(n), abs(den) * n2s


_EVALUATORS = {
    "m_d1": _ratio_m_d1,
    "m_d2": _ratio_m_d2,
    "m_a1": _ratio_m_a1,
    "m_b3": _ratio_m_b3,
    "m_d1_pair": _ratio_m_d1_pair,
    "m_d2_pair": _ratio_m_d2_pair,
    "h31": _ratio_h31,
}


# ---------------------------------------------------------------------------
# candidate generation (bare tuples; exhaustiveness decided by the driver)


def _nonzero_span(hi: int) -> list[int]:
    return [v for v in range(-hi, hi + 1) if v != 0]


def _magnitude_ladder(lo: int, hi: int, count: int = 9) -> list[int]:
    if hi <= lo:
        return [lo]
    vals = np.unique(np.round(np.geomspace(lo, hi, count)).astype(int).clip(lo, hi))
    return [int(v) for v in vals]


def _signed(values) -> list[int]:
    out = []
    for v in values:
        out.extend((v, -v))
    return out


def _free_count(lo: int, hi: int, arity: int) -> int:
    return (2 * hi) ** arity - (2 * (lo - 1)) ** arity


def _free_exhaustive(lo, hi, arity):
    span = _nonzero_span(hi)
    for t in product(span, repeat=arity):
        if max(abs(x) for x in t) >= lo:
            yield t


def _one_big_family(lo, hi, arity):
    """One entry in the shell, the rest small."""
    ladder = _magnitude_ladder(lo, hi)
    smalls = _nonzero_span(4)
    for pos in range(arity):
        for mag in ladder:
            for sign in (1, -1):
                big = sign * mag
                for rest in product(smalls, repeat=arity - 1):
                    yield rest[:pos] + (big,) + rest[pos:]


def _splits(a: int):
    """Ways to write a as n1 + n2 with both parts nonzero: balanced, one
    side tiny, and near-complete cancellation."""
    half = a // 2
    for n1 in (half - 1, half, half + 1, 1, 2, -1, -2, a - 1, a - 2, a + 1, a + 2):
        n2 = a - n1
        if n1 != 0 and n2 != 0:
            yield n1, n2


def _near_cancellation_families(lo, hi):
    """Shell-boundary corner tuples: the cubic phase of the merged triple
    carries two near-vanishing factors.  These are the configurations that
    attain the shell maxima, so every base magnitude in the shell is
    enumerated with all small offsets."""
    for m in range(lo, hi + 1):
        for sign in (1, -1):
            # merged pair nearly cancels the two trailing entries:
            # (n1+n2, n3, n4) ~ (-m + e1, m, m + e2)
            for e1 in (-3, -2, -1, 1, 2, 3):
                a = sign * (-m + e1)
                if a == 0:
                    continue
                for e2 in range(-3, 4):
                    n3 = sign * m
                    n4 = sign * (m + e2)
                    if n4 == 0:
                        continue
                    for n1, n2 in _splits(a):
                        yield (n1, n2, n3, n4)
            # leading entry nearly cancels both its partner and the
            # trailing pair sum: (n1, n2, n3+n4) ~ (m, -m + e1, -m + e2)
            for e1 in (-3, -2, -1, 1, 2, 3):
                n1 = sign * m
                n2 = sign * (-m + e1)
                for e2 in range(-3, 4):
                    b = sign * (-m + e2)
                    if b == 0:
                        continue
                    for n3, n4 in _splits(b):
                        yield (n1, n2, n3, n4)
                    # trailing pair large with near-cancelling sum
                    for n3, n4 in _splits(sign * (m + e2)):
                        yield (n1, n2, n3, n4)


def _direction_set(arity: int, count: int, seed: int) -> np.ndarray:
    """Seeded directions on the max-norm sphere, shared by every shell so
    that shell maxima are comparable scale by scale."""
    rng = seed_stream(seed, "sweep-directions", arity)
    dirs = rng.uniform(-1.0, 1.0, size=(count, arity))
    scale = np.max(np.abs(dirs), axis=1)
    keep = scale > 0.05
    return dirs[keep] / scale[keep, None]


def _scaled_direction_candidates(lo, hi, dirs):
    """The fixed direction set evaluated at several magnitudes per shell."""
    for mag in sorted({lo, (lo + hi) // 2, hi}):
        scaled = np.rint(dirs * mag).astype(np.int64)
        scaled[scaled == 0] = 1
        np.clip(scaled, -mag, mag, out=scaled)
        for row in scaled:
            yield tuple(int(v) for v in row)


def _pair_candidates(lo, hi, rng, skip_slots, random_count=100_000):
    """Tuples whose two largest magnitudes cancel: +L and -L placed in every
    ordered slot pair except the structurally excluded ones; remaining
    entries magnitude-laddered, then randomly topped up."""
    slot_pairs = [
        (i, k)
        for i in range(4)
        for k in range(4)
        if k != i and (i, k) not in skip_slots and (k, i) not in skip_slots
    ]
    for i, k in slot_pairs:
        for mag in _magnitude_ladder(lo, hi, count=12):
            rem_vals = _signed(_magnitude_ladder(1, mag, count=12))
            for rest in product(rem_vals, repeat=2):
                t = [0] * 4
                t[i] = mag
                t[k] = -mag
                it = iter(rest)
                for idx in range(4):
                    if idx != i and idx != k:
                        t[idx] = next(it)
                yield tuple(t)
    for _ in range(random_count):
        i, k = slot_pairs[int(rng.integers(len(slot_pairs)))]
        mag = int(rng.integers(lo, hi + 1))
        t = [0] * 4
        t[i] = mag
        t[k] = -mag
        for idx in range(4):
            if idx != i and idx != k:
                t[idx] = int(rng.integers(1, mag + 1)) * (1 if rng.integers(2) else -1)
        yield tuple(t)


def _resonant_quartic_stride(lo, hi, budget) -> int:
    est = sum(2 * (2 * (mag // SEPARATION)) ** 2 for mag in range(lo, hi + 1))
    return max(1, -(-est // budget))


def _resonant_quartic_candidates(lo, hi, resonant_slot, stride):
    """Quartic tuples with the shell frequency in the resonant slot and the
    other three summing to zero, each at most |n|/8 in magnitude."""
    for mag in range(lo, hi + 1, stride):
        cap = mag // SEPARATION
        if cap < 1:
            continue
        span = _nonzero_span(cap)
        for sign in (1, -1):
            n = sign * mag
            for a in span:
                for b in span:
                    c = -a - b
                    if c == 0 or abs(c) > cap:
                        continue
                    rest = (a, b, c)
                    yield rest[:resonant_slot] + (n,) + rest[resonant_slot:]


def _h31_cap(mag: int) -> int:
    # largest c with 8 c^{5/4} <= mag, i.e. 8^4 c^5 <= mag^4
    c = max(1, int(round((mag**4 / SEPARATION**4) ** 0.2)))
    while SEPARATION**4 * (c + 1) ** 5 <= mag**4:
        c += 1
    while c >= 1 and SEPARATION**4 * c**5 > mag**4:
        c -= 1
    return c


def _h31_stride(lo, hi, budget) -> int:
    est = sum(2 * (2 * _h31_cap(mag)) ** 3 for mag in range(lo, hi + 1))
    return max(1, -(-est // budget))


def _h31_candidates(lo, hi, stride):
    for mag in range(lo, hi + 1, stride):
        cap = _h31_cap(mag)
        if cap < 1:
            continue
        span = _nonzero_span(cap)
        for sign in (1, -1):
            n = sign * mag
            for n1 in span:
                for n2 in span:
                    for n4 in span:
                        n5 = -n1 - n2 - n4
                        if n5 == 0 or abs(n5) > cap or n4 + n5 == 0:
                            continue
                        yield (n1, n2, n, n4, n5)


# ---------------------------------------------------------------------------
# driver


def _shells(M: int):
    k = 0
    while 2**k <= M:
        yield 2**k, min(2 ** (k + 1) - 1, M)
        k += 1


def bound_ratio_sweep(
    bound_id: str, M: int, seed: int = 0, budget: int = DEFAULT_BUDGET
) -> list[ShellMax]:
    """Per-shell maxima of |symbol| / bound for one bound id; exact values,
    deterministic for a fixed seed."""
    if bound_id not in _EVALUATORS:
        raise ValueError(f"unknown bound id {bound_id!r}; known: {BOUND_IDS}")
    if M < 16:
        raise ValueError(f"M must be at least 16, got {M}")
    evaluate = _EVALUATORS[bound_id]
    dirs = (
        _direction_set(4, 60_000, seed) if bound_id in ("m_d1", "m_d2") else None
    )
    results = []
    for lo, hi in _shells(M):
        rng = seed_stream(seed, "sweep", bound_id, lo)
        if bound_id in ("m_d1", "m_d2"):
            if _free_count(lo, hi, 4) <= budget:
                candidates = _free_exhaustive(lo, hi, 4)
                exhaustive = True
            else:
                candidates = chain(
                    _one_big_family(lo, hi, 4),
                    _near_cancellation_families(lo, hi),
                    _scaled_direction_candidates(lo, hi, dirs),
                )
                exhaustive = False
        elif bound_id in ("m_d1_pair", "m_d2_pair"):
            skip = {(0, 1)} if bound_id == "m_d1_pair" else {(2, 3)}
            candidates = _pair_candidates(lo, hi, rng, skip)
            exhaustive = False
        elif bound_id in ("m_a1", "m_b3"):
            slot = 0 if bound_id == "m_a1" else 2
            stride = _resonant_quartic_stride(lo, hi, budget)
            candidates = _resonant_quartic_candidates(lo, hi, slot, stride)
            exhaustive = stride == 1
        else:  # h31
            stride = _h31_stride(lo, hi, budget)
            candidates = _h31_candidates(lo, hi, stride)
            exhaustive = stride == 1

        best = None  # (num, den, argmax)
        n_eval = 0
        for t in candidates:
            ratio = evaluate(t)
            if ratio is None:
                continue
            n_eval += 1
            rn, rd = ratio
            if best is None or rn * best[1] > best[0] * rd:
                best = (rn, rd, t)
        results.append(
            ShellMax(
                shell_lo=lo,
                shell_hi=hi,
                max_ratio=None if best is None else Fraction(best[0], best[1]),
                argmax=None if best is None else best[2],
                n_evaluated=n_eval,
                exhaustive=exhaustive,
            )
        )
    return results
