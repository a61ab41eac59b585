import numpy as np
import pytest

from qal.dimension import (
    GraphSamples,
    box_count,
    dimension_band,
    dimension_of_solution,
    dyadic_eps_ladder,
    fit_dimension,
    free_evolution,
    sample_field,
    sample_function,
    step_profile,
    talbot_snapshot,
    translate_exact,
    weierstrass,
)
from qal.evolution import SolverConfig, preset, solve
from qal.fields import random_sobolev_data


def test_graph_samples_validation():
    with pytest.raises(ValueError):
        GraphSamples(np.arange(64.0), np.zeros(64))  # too few
    xs = np.arange(2**12) * (2 * np.pi / 2**12)
    with pytest.raises(ValueError):
        GraphSamples(xs[::-1], np.zeros(2**12))


def test_box_count_constant_function():
    g = sample_function(lambda x: np.ones_like(x), 2**13)
    for k in (8, 16, 32):
        eps = 1.0 / k
        count = box_count(g, eps)
        assert count == pytest.approx(2 * np.pi * k, rel=0.05)


def test_box_count_resolution_guard():
    g = sample_function(lambda x: np.sin(x), 2**12)
    with pytest.raises(ValueError):
        box_count(g, g.spacing)


def test_box_count_monotone_in_eps():
    g = sample_function(weierstrass(terms=10), 2**13)
    eps = dyadic_eps_ladder(g)
    counts = [box_count(g, e) for e in eps]
    assert all(a <= b for a, b in zip(counts, counts[1:]))


def test_line_counts_scale_inverse_eps():
    g = sample_function(lambda x: x, 2**13)
    c1 = box_count(g, 2 * np.pi / 64)
    c2 = box_count(g, 2 * np.pi / 128)
    assert c2 / c1 == pytest.approx(2.0, rel=0.1)


def test_fit_dimension_line_and_square():
    line = fit_dimension(sample_function(lambda x: x, 2**13))
    assert line.slope == pytest.approx(1.0, abs=0.05)
    square = fit_dimension(sample_function(lambda x: np.sign(np.sin(x)), 2**13))
    assert square.slope == pytest.approx(1.0, abs=0.05)


def test_fit_dimension_needs_six_levels():
    g = sample_function(lambda x: x, 2**13)
    with pytest.raises(ValueError):
        fit_dimension(g, [0.5, 0.25, 0.125])


def test_weierstrass_dimension():
    expected = 2 - np.log(2) / np.log(3)
    for count in (2**15, 2**16):
        est = fit_dimension(sample_function(weierstrass(), count))
        assert est.slope == pytest.approx(expected, abs=0.1)


def test_resolution_independence():
    for fn in (lambda x: x, weierstrass()):
        a = fit_dimension(sample_function(fn, 2**15)).slope
        b = fit_dimension(sample_function(fn, 2**16)).slope
        assert abs(a - b) < 0.05


def test_talbot_identity_and_translates():
    g = step_profile(256)
    s0 = talbot_snapshot(g, 0, 1)
    assert np.array_equal(s0.coeffs, g.coeffs)
    for q in (2, 3, 5, 6, 10, 15, 30):
        snap = talbot_snapshot(g, 1, q)
        tran = translate_exact(g, 1, q)
        assert np.array_equal(snap.coeffs, tran.coeffs)


def test_talbot_lowest_terms():
    g = step_profile(16)
    with pytest.raises(ValueError):
        talbot_snapshot(g, 2, 4)


def test_rational_non_divisor_of_30_not_translate():
    g = step_profile(256)
    snap = talbot_snapshot(g, 1, 7)
    tran = translate_exact(g, 1, 7)
    assert not np.allclose(snap.coeffs, tran.coeffs)


def test_generic_time_step_evolution_dimension_window():
    u = free_evolution(step_profile(1024), 1.0)
    est = fit_dimension(sample_field(u, 2**13))
    assert 1.2 <= est.slope <= 1.9


def test_dimension_band_values():
    lo, hi = dimension_band(0.75)
    assert lo == 1.25 and hi == pytest.approx(1.75)
    assert dimension_band(0.547)[1] == pytest.approx(115 / 32 - 3 * 0.547)
    assert dimension_band(0.549)[1] == pytest.approx(39 / 20)
    assert dimension_band(0.56)[1] == pytest.approx(5 / 2 - 0.56)
    with pytest.raises(ValueError):
        dimension_band(0.5)


def test_dimension_of_solution_reports_both_fields():
    u0 = random_sobolev_data(1.0, 16, 9)
    cfg = SolverConfig(N=16, dt=2e-6, T=2e-4, snapshot_stride=10)
    traj = solve(u0, preset("toy"), cfg)
    out = dimension_of_solution(traj, traj.times[-1], sample_count=2**12)
    assert out["tilde_re"] is not None
    assert out["tilde_im"] is None  # real field
    assert out["difference_re"] is not None
    with pytest.raises(ValueError):
        dimension_of_solution(traj, 1e9)


def test_zero_solution_dimension_is_flat():
    # zero difference field reports None; the zero tilde field too
    from qal.fields import SpectralField

    u0 = SpectralField(16, np.zeros(33, complex))
    cfg = SolverConfig(N=16, dt=2e-6, T=2e-4, snapshot_stride=10)
    traj = solve(u0, preset("toy"), cfg)
    out = dimension_of_solution(traj, 0.0, sample_count=2**12)
    assert out["tilde_re"] is None and out["difference_re"] is None
