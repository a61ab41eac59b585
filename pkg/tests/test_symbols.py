from fractions import Fraction

import pytest

from qal.rng import seed_stream
from qal.symbols import (
    SymbolDomainError,
    eval_symbol,
    phase_is_large,
    verify_re1_combination,
    verify_resonant_reduction,
)
from qal.symbols.multipliers import raw_a_ell, raw_d1, raw_d2


def test_m_r1_example():
    v = eval_symbol("m_r1", (1, 2))
    assert v.value == Fraction(1, 14)
    assert v.indicator_active


def test_m_r1_domain_error_on_vanishing_phase():
    with pytest.raises(SymbolDomainError):
        eval_symbol("m_r1", (3, -3))


def test_arity_mismatch_rejected():
    with pytest.raises(ValueError):
        eval_symbol("m_d1", (1, 2, 3))
    with pytest.raises(ValueError):
        eval_symbol("unknown", (1, 2))


def test_indicator_off_gives_exact_zero():
    # mid-cascade triple (n1+n2, n3, n4): huge first entry, structured rest
    found = False
    rng = seed_stream(8, "symbols-ind")
    for _ in range(50000):
        t = tuple(
            int(v) for v in rng.integers(1, 150, size=4) * rng.choice([-1, 1], size=4)
        )
        a = t[0] + t[1]
        if a == 0:
            continue
        if not phase_is_large((a, t[2], t[3])):
            v = eval_symbol("m_d1", t)
            assert v.value == 0 and not v.indicator_active
            found = True
            break
    assert found


def test_h_symbol_example():
    # resonant quintic tuple with n = 10 in slot 3
    v = eval_symbol("h", (1, 1, 10, 2, -4), ell=3, j=1)
    assert v.value == Fraction(5 * 10**14)


def test_h_rejects_out_of_range_pattern():
    with pytest.raises(ValueError):
        eval_symbol("h", (1, 1, 10, 2, -4), ell=4, j=2)


def test_resonant_symbols_vanish_off_resonance():
    assert eval_symbol("m_a1", (3, 1, 1, 1)).value == 0
    assert eval_symbol("m_b3", (1, 2, 3, 4)).value == 0


def test_resonant_symbols_match_base_on_resonance():
    # n = n_1: remaining entries sum to zero
    t = (40, 1, 2, -3)
    va = eval_symbol("m_a1", t)
    vd = eval_symbol("m_d1", t)
    assert va.indicator_active and va.value == vd.value
    t = (1, 2, 40, -3)  # n = n_3
    vb = eval_symbol("m_b3", t)
    vd = eval_symbol("m_d2", t)
    assert vb.indicator_active and vb.value == vd.value


def test_quintic_cascade_tends_to_leading_resonant_form():
    # n_3 = n resonance: symbol approaches 1/(125 n1 (n4+n5) n4) at rate 1/n
    n1, n2, n4 = 1, 2, 3
    n5 = -n1 - n2 - n4
    lead = Fraction(1, 125 * n1 * (n4 + n5) * n4)
    errs = []
    for n in (10**3, 10**4, 10**5):
        raw = raw_a_ell((n1, n2, n, n4, n5), 3)
        errs.append(abs(Fraction(*raw) - lead))
    assert errs[0] / errs[1] == pytest.approx(10, rel=0.2)
    assert errs[1] / errs[2] == pytest.approx(10, rel=0.2)


def test_resonant_reduction_example_and_sweep():
    lhs, rhs = verify_resonant_reduction(2, 1)
    assert lhs == rhs == Fraction(25, 7)
    rng = seed_stream(9, "resred")
    for _ in range(2000):
        n = int(rng.integers(1, 1001)) * (1 if rng.integers(2) else -1)
        n3 = int(rng.integers(1, 1001)) * (1 if rng.integers(2) else -1)
        if n + n3 == 0:
            continue
        lhs, rhs = verify_resonant_reduction(n, n3)
        assert lhs == rhs


def test_resonant_reduction_parity_pair():
    # the first two expansion terms are odd in the paired frequency
    for n, n3 in ((5, 2), (7, -3), (12, 11)):
        def first_two(n, n3):
            return Fraction(n * n + n3 * n3, n3) - Fraction(n * n, 2 * n3)

        assert first_two(n, n3) + first_two(n, -n3) == 0


def test_re1_combination_example_and_sweep():
    lhs, rhs = verify_re1_combination(1, 1)
    assert lhs == rhs == Fraction(-1, 3)
    rng = seed_stream(10, "re1")
    for _ in range(2000):
        n = int(rng.integers(1, 1001)) * (1 if rng.integers(2) else -1)
        n3 = int(rng.integers(1, 1001)) * (1 if rng.integers(2) else -1)
        lhs, rhs = verify_re1_combination(n, n3)
        assert lhs == rhs


def test_degenerate_pairs_rejected():
    with pytest.raises(ValueError):
        verify_resonant_reduction(1, -1)
    with pytest.raises(ValueError):
        verify_re1_combination(0, 1)


def test_raw_d2_matches_longhand():
    rng = seed_stream(12, "longhand")
    checked = 0
    while checked < 200:
        t = tuple(
            int(v) for v in rng.integers(1, 40, size=4) * rng.choice([-1, 1], size=4)
        )
        n1, n2, n3, n4 = t
        s234, s34 = n2 + n3 + n4, n3 + n4
        n = n1 + s234
        try:
            raw = raw_d2(*t)
        except SymbolDomainError:
            continue
        if raw is None:
            continue
        phi2 = Fraction(5, 2) * n * n1 * s234 * (n * n + n1 * n1 + s234 * s234)
        m = n1 + n2 + s34
        phi3 = (
            Fraction(5, 2)
            * (n1 + n2)
            * (n2 + s34)
            * (n1 + s34)
            * (m * m + n1 * n1 + n2 * n2 + s34 * s34)
        )
        num = (
            n * (n1**2 + s234**2) * s234 * (n2**2 + s34**2) * s34 * (n3**2 + n4**2)
        )
        assert Fraction(*raw) == Fraction(num) / (phi2 * phi3)
        checked += 1
