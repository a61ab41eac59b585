from fractions import Fraction

import pytest

from qal.symbols import BOUND_IDS, bound_ratio_sweep


def test_unknown_bound_and_small_m_rejected():
    with pytest.raises(ValueError):
        bound_ratio_sweep("nope", 64)
    with pytest.raises(ValueError):
        bound_ratio_sweep("m_d1", 8)


def test_exhaustive_small_shells_finite_max():
    res = bound_ratio_sweep("m_d1", 16, seed=0)
    assert all(r.exhaustive for r in res)
    occupied = [r for r in res if r.max_ratio is not None]
    assert occupied, "no admissible tuples found below 16"
    assert all(isinstance(r.max_ratio, Fraction) for r in occupied)
    assert all(r.max_ratio > 0 for r in occupied)


def test_sweep_deterministic():
    a = bound_ratio_sweep("m_b3", 64, seed=5)
    b = bound_ratio_sweep("m_b3", 64, seed=5)
    assert a == b


def test_resonant_domain_restriction_excludes_small_separation():
    # |n| >= 8 n_2* leaves no admissible tuples below shell 16
    res = bound_ratio_sweep("m_b3", 64, seed=0)
    for r in res:
        if r.shell_hi < 16:
            assert r.max_ratio is None
        if r.max_ratio is not None and r.argmax is not None:
            t = r.argmax
            n = t[2]
            assert abs(n) >= 8 * max(abs(t[0]), abs(t[1]), abs(t[3]))


def test_all_bounds_have_evaluators_and_run_small():
    for bid in BOUND_IDS:
        res = bound_ratio_sweep(bid, 16, seed=1, budget=50_000)
        assert len(res) >= 4
