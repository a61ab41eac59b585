"""Exact cancellation identities on constrained frequency hyperplanes.

Each kind is a weighted multilinear sum of field coefficients over a
zero-sum hyperplane that the analysis requires to vanish.  Sums are
evaluated in exact rational arithmetic; the contract is an exact zero on
Hermitian rational fields.  Controls that perturb one multilinear slot
independently show the cancellations are structural, not accidental.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..rng import seed_stream

KINDS = ("inv_n1n4", "affine", "a1a3", "a2a3sq", "odd_parity", "h_pairing")

_KIND_SLOTS = {
    "inv_n1n4": 3,
    "affine": 3,
    "a1a3": 3,
    "a2a3sq": 3,
    "odd_parity": 2,
    "h_pairing": 4,
}

CRat = tuple[Fraction, Fraction]

_CZERO: CRat = (Fraction(0), Fraction(0))


def _cmul(a: CRat, b: CRat) -> CRat:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cadd(a: CRat, b: CRat) -> CRat:
    return (a[0] + b[0], a[1] + b[1])


def _cscale(w: Fraction, a: CRat) -> CRat:
    return (w * a[0], w * a[1])


@dataclass(frozen=True)
class RationalField:
    """Mean-zero coefficient vector with exact rational real/imaginary parts,
    indexed n = -N..N."""

    N: int
    re: tuple[Fraction, ...]
    im: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.re) != 2 * self.N + 1 or len(self.im) != 2 * self.N + 1:
            raise ValueError("coefficient length must be 2N+1")

    def coeff(self, n: int) -> CRat:
        if abs(n) > self.N:
            return _CZERO
        return (self.re[n + self.N], self.im[n + self.N])

    def is_hermitian(self) -> bool:
        return all(
            self.coeff(-n) == (self.coeff(n)[0], -self.coeff(n)[1])
            for n in range(self.N + 1)
        )


def random_rational_field(N: int, seed, denominator: int = 64) -> RationalField:
    """Seeded Hermitian field with coefficients (a + ib)/denominator,
    a, b integers in [-denominator, denominator]; mean slot zero."""
    rng = seed if isinstance(seed, np.random.Generator) else seed_stream(seed, "rational-field")
    re = [Fraction(0)] * (2 * N + 1)
    im = [Fraction(0)] * (2 * N + 1)
    for n in range(1, N + 1):
        a = Fraction(int(rng.integers(-denominator, denominator + 1)), denominator)
        b = Fraction(int(rng.integers(-denominator, denominator + 1)), denominator)
        re[n + N], im[n + N] = a, b
        re[-n + N], im[-n + N] = a, -b
    return RationalField(N, tuple(re), tuple(im))


def break_one_mode(
    f: RationalField, mode: int = 1, delta: Fraction = Fraction(1, 7)
) -> RationalField:
    """Shift the real part of one positive mode without touching its
    conjugate partner, so Hermitian symmetry fails at exactly one pair."""
    if not 0 < mode <= f.N:
        raise ValueError(f"mode must lie in 1..{f.N}, got {mode}")
    re = list(f.re)
    re[mode + f.N] += delta
    return RationalField(f.N, tuple(re), f.im)


def _nonzero_range(N: int):
    return [n for n in range(-N, N + 1) if n != 0]


def _sum_triple(fields, weight) -> CRat:
    """Sum over the zero-sum triple hyperplane of weight(a, b, c) times the
    slot coefficients at (a, b, c), with b = -a - c determined."""
    f0, f1, f2 = fields
    N = f0.N
    acc = _CZERO
    for a in _nonzero_range(N):
        ca = f0.coeff(a)
        if ca == _CZERO:
            continue
        for c in _nonzero_range(N):
            b = -a - c
            if b == 0 or abs(b) > N:
                continue
            w = weight(a, b, c)
            if w == 0:
                continue
            term = _cmul(_cmul(ca, f1.coeff(b)), f2.coeff(c))
            acc = _cadd(acc, _cscale(w, term))
    return acc


def _pair_transform(f0, f1, weighted: bool):
    """S(j) = sum_{a+b=j} w(a) f0(a) f1(b) for all j, with w = 1/a when
    weighted else 1."""
    N = f0.N
    out: dict[int, CRat] = {}
    for a in _nonzero_range(N):
        ca = f0.coeff(a)
        if ca == _CZERO:
            continue
        wa = Fraction(1, a) if weighted else Fraction(1)
        for b in _nonzero_range(N):
            j = a + b
            term = _cscale(wa, _cmul(ca, f1.coeff(b)))
            out[j] = _cadd(out.get(j, _CZERO), term)
    return out


def _sum_kind(kind: str, fields: list[RationalField]) -> CRat:
    if kind == "inv_n1n4":
        return _sum_triple(fields, lambda n1, n2, n4: Fraction(1, n1 * n4))
    if kind == "affine":
        return _sum_triple(
            fields, lambda n1, n2, n4: Fraction(3 * n2 + 6 * n4, n1 * n4)
        )
    if kind == "a1a3":
        return _sum_triple(
            fields,
            lambda n2, n3, n4: Fraction(1, n2) + Fraction(1, n2 + n3),
        )
    if kind == "a2a3sq":
        pieces = _a2a3sq_pieces(fields)
        return _cadd(_cadd(pieces[0], pieces[1]), pieces[2])
    if kind == "odd_parity":
        f0, f1 = fields
        acc = _CZERO
        for k in _nonzero_range(f0.N):
            p = k + k**3 + k**5
            term = _cmul(f0.coeff(k), f1.coeff(-k))
            acc = _cadd(acc, _cscale(Fraction(p), term))
        return acc
    if kind == "h_pairing":
        f0, f1, f2, f3 = fields
        left = _pair_transform(f0, f1, weighted=True)
        right = _pair_transform(f2, f3, weighted=True)
        acc = _CZERO
        for j, sr in right.items():
            if j == 0:
                continue
            sl = left.get(-j)
            if sl is None:
                continue
            acc = _cadd(acc, _cscale(Fraction(1, j), _cmul(sl, sr)))
        return acc
    raise ValueError(f"unknown cancellation kind {kind!r}")


def _a2a3sq_pieces(fields) -> list[CRat]:
    """The three resonance-family sums whose weights add to the pointwise
    zero (n2 + n3 + n4) / (n2 (n2 + n3)) on the hyperplane."""
    pieces = []
    for pick in (
        lambda n2, n3, n4: Fraction(n2, n2 * (n2 + n3)),
        lambda n2, n3, n4: Fraction(n3, n2 * (n2 + n3)),
        lambda n2, n3, n4: Fraction(n4, n2 * (n2 + n3)),
    ):
        pieces.append(_sum_triple(fields, pick))
    return pieces


def cancellation_sum(kind: str, f: RationalField) -> CRat:
    """Exact weighted hyperplane sum for one cancellation kind.

    Returns the complex value as a (real, imaginary) pair of fractions;
    exactly (0, 0) on Hermitian rational fields for every kind.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown cancellation kind {kind!r}")
    return _sum_kind(kind, [f] * _KIND_SLOTS[kind])


def cancellation_pieces(kind: str, f: RationalField) -> list[CRat]:
    """Per-family sums for kinds built from several resonance families.

    Only 'a2a3sq' decomposes; its three pieces are individually nonzero in
    general while their sum vanishes term by term.
    """
    if kind != "a2a3sq":
        raise ValueError(f"kind {kind!r} has no family decomposition")
    return _a2a3sq_pieces([f] * _KIND_SLOTS[kind])


def cancellation_control(
    kind: str,
    f: RationalField,
    mode: int = 1,
    delta: Fraction = Fraction(1, 7),
) -> CRat:
    """Broken-symmetry control for a cancellation kind.

    The identities hold because every multilinear slot carries the same
    field, so the summand is invariant under relabeling the hyperplane.
    The control breaks that: one slot receives a copy of the field with
    Hermitian symmetry broken on one mode.  For 'a2a3sq', whose weight
    vanishes pointwise, the control is instead the first resonance family
    alone.  Nonzero in general.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown cancellation kind {kind!r}")
    if kind == "a2a3sq":
        return _a2a3sq_pieces([f] * _KIND_SLOTS[kind])[0]
    g = break_one_mode(f, mode=mode, delta=delta)
    fields = [f] * _KIND_SLOTS[kind]
    fields[0] = g
    return _sum_kind(kind, fields)


def h_pairing_direct(f: RationalField) -> CRat:
    """Direct quadruple-loop evaluation of the 'h_pairing' sum (no pair
    factorization); for cross-checking at small N."""
    N = f.N
    acc = _CZERO
    rng_ = _nonzero_range(N)
    for n1 in rng_:
        c1 = f.coeff(n1)
        for n4 in rng_:
            c4 = f.coeff(n4)
            w14 = _cmul(c1, c4)
            for n5 in rng_:
                j = n4 + n5
                if j == 0:
                    continue
                n2 = -n1 - n4 - n5
                if n2 == 0 or abs(n2) > N:
                    continue
                w = Fraction(1, n1 * j * n4)
                term = _cmul(_cmul(w14, f.coeff(n5)), f.coeff(n2))
                acc = _cadd(acc, _cscale(w, term))
    return acc
