import numpy as np
import pytest

from qal.evolution import EquationParams, SolverConfig, preset
from qal.experiments import (
    amplitude_scaling,
    dirichlet_field,
    fit_tail_decay,
    free_l8_norm,
    smoothing_report,
    strichartz_probe,
    tail_window,
)
from qal.fields import SpectralField, random_sobolev_data, sobolev_norm


def test_tail_window_bounds():
    lo, hi = tail_window(256)
    assert lo == 32 and hi == 64


def test_fit_tail_decay_recovers_power_law():
    N = 256
    modes = np.arange(N + 1, dtype=float)
    modes[0] = 1.0
    profile = modes**-1.25
    d, resid = fit_tail_decay(profile, N)
    assert d == pytest.approx(1.25, abs=1e-9)
    assert resid < 1e-12


def test_smoothing_report_free_equation_flags_linear():
    cfg = SolverConfig(N=32, dt=1e-6, T=5e-5)
    rep = smoothing_report(0.75, EquationParams(), cfg, seeds=(0, 1))
    assert rep.flags == ("linear",)
    assert np.isnan(rep.mean_gain_by_n[32])
    assert np.all(rep.diff_norm_series[32] == 0)


def test_smoothing_report_small_run_positive_gain():
    cfg = SolverConfig(N=64, dt=0.1 / 64**3, T=0.002, mode_filter="wall")
    rep = smoothing_report(
        0.75, preset("toy"), cfg, seeds=(0,), amplitude=0.02
    )
    assert not rep.inconclusive
    point = rep.points[0]
    assert point.stable
    assert point.data_decay == pytest.approx(1.25, abs=0.01)
    assert point.gain > 0


def test_smoothing_report_reproducible():
    cfg = SolverConfig(N=64, dt=0.1 / 64**3, T=5e-4, mode_filter="wall")
    a = smoothing_report(0.75, preset("toy"), cfg, seeds=(0,), amplitude=0.02)
    b = smoothing_report(0.75, preset("toy"), cfg, seeds=(0,), amplitude=0.02)
    assert a.points == b.points
    assert np.array_equal(a.diff_norm_series[64], b.diff_norm_series[64])


def test_smoothing_difference_norm_envelope():
    # sup_t ||diff||_{H^s} <= sup ||tilde||_{H^s} + ||u0||_{H^s} with the
    # gauge an isometry, so 2 ||u0|| bounds it at these short times
    s = 0.75
    cfg = SolverConfig(N=64, dt=0.1 / 64**3, T=5e-4, mode_filter="wall")
    rep = smoothing_report(s, preset("toy"), cfg, seeds=(0,), amplitude=0.02, epsilon=0.0)
    u0 = random_sobolev_data(s, 64, __import__("qal.rng", fromlist=["seed_stream"]).seed_stream(0, "smoothing-data"))
    bound = 2.02 * 0.02 * sobolev_norm(u0, s)
    assert rep.points[0].sup_diff_norm <= bound


def test_amplitude_scaling_quadratic():
    cfg = SolverConfig(N=48, dt=0.1 / 48**3, T=0.001, mode_filter="wall")
    out = amplitude_scaling(
        0.75, preset("toy"), cfg, seeds=(0,), base_amplitude=0.02
    )
    assert out["stable"]
    assert out["exponent"] == pytest.approx(2.0, abs=0.3)


def test_l8_single_mode_is_one():
    N = 16
    c = np.zeros(2 * N + 1, dtype=complex)
    c[2 * N] = 1.0
    val, _, _ = free_l8_norm(SpectralField(N, c))
    assert val == pytest.approx(1.0, abs=1e-12)
    ratio = val / sobolev_norm(SpectralField(N, c), 3 / 32 + 0.01)
    assert ratio == pytest.approx((1 + N * N) ** (-(3 / 32 + 0.01) / 2), rel=1e-9)


def test_strichartz_ladder_non_diverging():
    probe = strichartz_probe(3 / 32, n_ladder=(32, 64, 128), seeds=(0,))
    for fam in ("dirichlet", "random-s0"):
        rs = probe.ratios(fam)
        assert max(rs) / min(rs) <= 3.0
    assert all(r.converged for r in probe.rows)


def test_strichartz_rejects_negative_a():
    with pytest.raises(ValueError):
        strichartz_probe(-0.5, n_ladder=(32,))


def test_dirichlet_field_mean_zero():
    f = dirichlet_field(8)
    assert f.mean == 0.0
    assert f.coeff(3) == 1.0
