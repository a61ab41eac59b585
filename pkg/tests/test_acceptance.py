"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`.  The heavy smoothing
criterion integrates at N = 256 and takes its time budget seriously; the
full module is sized for roughly twenty minutes on a small machine.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from qal.evolution import (
    EquationParams,
    SolverConfig,
    energy_balance_residual,
    max_coefficient_deviation,
    oracle_solve,
    preset,
    solve,
)
from qal.experiments import amplitude_scaling, smoothing_report, strichartz_probe
from qal.fields import SpectralField, random_sobolev_data, sobolev_norm
from qal.gauge import apply_k_gauge, interaction_picture, k_functional, tilde_transform
from qal.rng import seed_stream
from qal.symbols import (
    KINDS,
    bound_ratio_sweep,
    cancellation_control,
    cancellation_sum,
    phi,
    phi2_factored,
    phi3_factored,
    random_rational_field,
    telescope_decompose,
    verify_re1_combination,
    verify_resonant_reduction,
)
from qal.dimension import (
    fit_dimension,
    free_evolution,
    sample_field,
    sample_function,
    step_profile,
    talbot_snapshot,
    translate_exact,
    weierstrass,
)

ZERO = (Fraction(0), Fraction(0))


def _report(name: str, ok: bool, detail: str = ""):
    print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


def test_criterion_1_exact_factorizations():
    t0 = time.time()
    for a in range(-50, 51):
        for b in range(-50, 51):
            if a and b:
                assert phi((a, b)) == phi2_factored(a, b)
    for a in range(-50, 51):
        for b in range(-50, 51):
            if not (a and b):
                continue
            for c in range(-50, 51):
                if c:
                    assert phi((a, b, c)) == phi3_factored(a, b, c)
    rng = seed_stream(0, "acceptance-telescope")
    checked = 0
    for p in (4, 5, 6):
        done = 0
        while done < 10_000 // 3 + 1:
            t = tuple(
                int(v)
                for v in rng.integers(1, 10**4, size=p) * rng.choice([-1, 1], size=p)
            )
            if sum(t[2:]) == 0:
                continue
            assert sum(telescope_decompose(t)) == phi(t)
            done += 1
            checked += 1
    elapsed = time.time() - t0
    _report(
        "criterion 1 (exact factorizations + telescoping)",
        elapsed < 60.0,
        f"{checked} telescoped tuples, {elapsed:.1f}s (< 60s required)",
    )


def test_criterion_2_exact_cancellations():
    t0 = time.time()
    bad = []
    for kind in KINDS:
        for i in range(100):
            N = (4, 8, 16, 32)[i % 4]
            f = random_rational_field(N, seed_stream(0, "acceptance-canc", kind, i))
            if cancellation_sum(kind, f) != ZERO:
                bad.append((kind, i))
        control = cancellation_control(
            kind, random_rational_field(8, seed_stream(0, "acceptance-ctl", kind))
        )
        if control == ZERO:
            bad.append((kind, "control"))
    elapsed = time.time() - t0
    _report(
        "criterion 2 (six cancellation kinds exactly zero, controls nonzero)",
        not bad and elapsed < 300.0,
        f"failures={bad}, {elapsed:.1f}s (< 300s required)",
    )


def test_criterion_3_pointwise_identities():
    rng = seed_stream(0, "acceptance-pointwise")
    failures = 0
    done = 0
    while done < 10_000:
        n = int(rng.integers(1, 1001)) * (1 if rng.integers(2) else -1)
        n3 = int(rng.integers(1, 1001)) * (1 if rng.integers(2) else -1)
        if n + n3 == 0:
            continue
        l1, r1 = verify_resonant_reduction(n, n3)
        l2, r2 = verify_re1_combination(n, n3)
        failures += (l1 != r1) + (l2 != r2)
        done += 1
    _report("criterion 3 (pointwise resonant identities on 1e4 pairs)", failures == 0,
            f"{failures} failures")


def test_criterion_4_symbol_bound_shell_agreement():
    rows = []
    ok = True
    for bound_id in ("m_d1", "m_d2", "m_a1", "m_b3", "m_d1_pair", "m_d2_pair", "h31"):
        res = bound_ratio_sweep(bound_id, 255, seed=0)
        by_shell = {r.shell_lo: r.max_ratio for r in res}
        r64, r128 = by_shell.get(64), by_shell.get(128)
        good = r64 is not None and r128 is not None
        if good:
            rel = abs(float(r64) / float(r128) - 1.0)
            good = rel <= 0.10
            rows.append(f"{bound_id}: r64={float(r64):.4g} r128={float(r128):.4g} rel={rel:.3f}")
        else:
            rows.append(f"{bound_id}: empty shell")
        ok &= good
    _report("criterion 4 (dyadic shells 64/128 agree within 10%)", ok, "; ".join(rows))


def test_criterion_5_solver_correctness():
    details = []
    # oracle equivalence on the three presets
    worst = 0.0
    for name in ("toy", "full", "integrable"):
        for seed in (11, 12, 13):
            u0 = random_sobolev_data(1.0, 8, seed)
            cfg = SolverConfig(N=8, dt=0.01 / 2000, T=0.01, snapshot_stride=500)
            dev = max_coefficient_deviation(
                solve(u0, preset(name), cfg), oracle_solve(u0, preset(name), cfg)
            )
            worst = max(worst, dev)
    details.append(f"oracle max dev {worst:.2e}")
    assert worst < 1e-8

    # measured convergence order in the oscillation-resolved regime
    u0 = SpectralField(8, 0.5 * random_sobolev_data(1.0, 8, 5).coeffs)
    finals = []
    for k in range(3):
        cfg = SolverConfig(N=8, dt=1e-5 / 2**k, T=0.01, snapshot_stride=10**9)
        finals.append(solve(u0, preset("toy"), cfg).snapshots[-1].coeffs)
    order = float(
        np.log2(
            np.max(np.abs(finals[0] - finals[1]))
            / np.max(np.abs(finals[1] - finals[2]))
        )
    )
    details.append(f"order {order:.2f}")
    assert 3.7 <= order <= 4.3

    # mean conservation
    u0 = random_sobolev_data(1.0, 12, 4)
    cfg = SolverConfig(N=12, dt=2e-6, T=4e-4, snapshot_stride=20)
    traj = solve(u0, preset("full"), cfg)
    mean_drift = float(np.max(np.abs(traj.diagnostics["mean"])))
    details.append(f"mean drift {mean_drift:.1e}")
    assert mean_drift < 1e-13

    # free flow exact
    from qal.evolution import step
    from qal.fields import cosine_field

    v = step(cosine_field(8), EquationParams(), 0.37)
    free_err = abs(v.coeff(1) - 0.5 * np.exp(0.37j))
    details.append(f"free-flow err {free_err:.1e}")
    assert free_err < 1e-14

    # energy identity for the quadratic-flux preset
    u0 = SpectralField(8, 0.5 * random_sobolev_data(1.0, 8, 6).coeffs)
    cfg = SolverConfig(N=8, dt=2.5e-7, T=100 * 2.5e-7, snapshot_stride=1)
    resid = energy_balance_residual(solve(u0, preset("toy"), cfg))
    details.append(f"energy residual {resid:.1e}")
    assert resid < 1e-8
    _report("criterion 5 (solver correctness)", True, ", ".join(details))


def test_criterion_6_gauge_isometry():
    worst_norm = 0.0
    for seed in range(10):
        f = random_sobolev_data(0.8, 64, seed)
        for s in (0.0, 0.5, 1.0, 2.0):
            base = sobolev_norm(f, s)
            for g in (
                interaction_picture(f, 0.7 + seed),
                apply_k_gauge(f, 0.31j * (seed + 1), "forward"),
            ):
                worst_norm = max(
                    worst_norm, abs(sobolev_norm(g, s) - base) / max(base, 1e-30)
                )
    assert worst_norm < 1e-12

    u0 = random_sobolev_data(1.0, 16, 8)
    cfg = SolverConfig(N=16, dt=5e-7, T=2e-4, snapshot_stride=16)
    traj = solve(u0, preset("toy"), cfg)
    k_real = float(np.max(np.abs(traj.gauge.k_samples.real)))
    assert k_real < 1e-13
    back = tilde_transform(tilde_transform(traj), "inverse")
    rt = max(
        float(np.max(np.abs(a.coeffs - b.coeffs)))
        for a, b in zip(traj.snapshots, back.snapshots)
    )
    assert rt < 1e-12
    _report(
        "criterion 6 (gauge isometries)",
        True,
        f"norm defect {worst_norm:.1e}, K real part {k_real:.1e}, round trip {rt:.1e}",
    )


@pytest.mark.slow
def test_criterion_7_nonlinear_smoothing():
    # Amended configuration: data amplitude 0.02 (the spec's unit
    # normalization blows up numerically at any step size; see the
    # decisions ledger), fit band [N/8, N/4] inside the resolvable zone.
    t0 = time.time()
    cfg = SolverConfig(N=256, dt=0.1 / 256**3, T=0.005, mode_filter="wall")
    rep = smoothing_report(
        0.75, preset("toy"), cfg, seeds=range(8), amplitude=0.02
    )
    gain = rep.mean_gain_by_n[256]
    ok = (not rep.inconclusive) and gain >= 0.25
    detail = (
        f"mean gain {gain:.3f} (>= 0.25 required; ceiling eps < 0.406), "
        f"flags={rep.flags}"
    )
    scaling = amplitude_scaling(
        0.75, preset("toy"), cfg, seeds=(0, 1), base_amplitude=0.02
    )
    ok &= scaling["stable"] and abs(scaling["exponent"] - 2.0) <= 0.3
    elapsed = (time.time() - t0) / 60.0
    detail += f", scaling exponent {scaling['exponent']:.2f} (2.0 +/- 0.3), {elapsed:.1f} min (< 30 required)"
    ok &= elapsed < 30.0
    _report("criterion 7 (nonlinear smoothing, amended amplitude)", ok, detail)


def test_criterion_7_unit_amplitude_is_dynamically_inaccessible():
    # The blocking fact for the criterion's literal configuration, kept
    # cheap: at unit normalization the run destabilizes at any step size.
    from qal.evolution import integrate_batch

    N = 64
    H0 = np.array(random_sobolev_data(0.75, N, seed_stream(7, "sm", 0)).coeffs[N:])[None, :]
    oks = []
    with np.errstate(all="ignore"):
        for fac in (0.25, 0.05):
            dt = fac / N**3
            n = int(round(0.005 / dt))
            *_, ok = integrate_batch(H0, preset("toy"), dt, n, max(2, (n // 8) // 2 * 2),
                                     mode_filter="wall")
            oks.append(bool(ok[0]))
    _report(
        "criterion 7 supplement (unit amplitude blows up, dt-independent)",
        not any(oks),
        f"stable={oks} for dt in {{0.25, 0.05}}/N^3",
    )


def test_criterion_8_dimension_calibration():
    details = []
    line = fit_dimension(sample_function(lambda x: x, 2**13)).slope
    square = fit_dimension(sample_function(lambda x: np.sign(np.sin(x)), 2**13)).slope
    assert abs(line - 1.0) <= 0.05 and abs(square - 1.0) <= 0.05
    details.append(f"line {line:.3f}, square {square:.3f}")

    expected = 2 - np.log(2) / np.log(3)
    w15 = fit_dimension(sample_function(weierstrass(), 2**15)).slope
    w16 = fit_dimension(sample_function(weierstrass(), 2**16)).slope
    assert abs(w15 - expected) <= 0.1 and abs(w16 - expected) <= 0.1
    details.append(f"weierstrass {w15:.3f}/{w16:.3f} (target {expected:.3f} +/- 0.1)")

    g = step_profile(1024)
    for q in (2, 3, 5, 6, 10, 15, 30):
        assert np.array_equal(
            talbot_snapshot(g, 1, q).coeffs, translate_exact(g, 1, q).coeffs
        )
    details.append("rational-time translates exact for q | 30")

    revival = fit_dimension(sample_field(talbot_snapshot(g, 1, 30), 2**13)).slope
    generic = fit_dimension(sample_field(free_evolution(g, 1.0), 2**13)).slope
    lo_band, hi_band = 2 - 0.75, 5 / 2 - 0.75
    in_band = lo_band <= generic <= hi_band
    assert revival <= 1.15
    assert 1.2 <= generic <= 1.9
    details.append(
        f"revival {revival:.3f} (~1), generic-time {generic:.3f} in [1.2, 1.9]; "
        f"advisory band at s=0.75 is [{lo_band:.2f}, {hi_band:.2f}] "
        f"({'inside' if in_band else 'outside - advisory only'})"
    )
    _report("criterion 8 (dimension calibration + revivals)", True, "; ".join(details))


def test_criterion_9_strichartz_ladder():
    probe = strichartz_probe(3 / 32, n_ladder=(32, 64, 128, 256, 512), seeds=(0,))
    rows = []
    ok = True
    for fam in ("dirichlet", "random-s0"):
        rs = probe.ratios(fam)
        spread = max(rs) / min(rs)
        rows.append(f"{fam}: ratios {[round(r, 3) for r in rs]} spread {spread:.2f}")
        ok &= spread <= 3.0
    trend = strichartz_probe(0.0, n_ladder=(32, 64, 128), seeds=(0,))
    rows.append(
        "a=0 trend (recorded, no pass/fail): "
        + str([round(r, 3) for r in trend.ratios("dirichlet")])
    )
    _report("criterion 9 (L8 ratio ladder non-diverging)", ok, "; ".join(rows))
