"""Measurable-consequence drivers: nonlinear smoothing of the gauged flow
and space-time L^8 ratio probes of the propagator.

The smoothing driver solves the equation for seeded rough data, applies the
mean-flux gauge, subtracts the free evolution, and fits spectral tail
slopes of data and difference; the reported gain is the extra decay of the
difference.  Amplitude enters explicitly: the tail-slope gain and the
quadratic amplitude scaling of the difference are scale-free, and the
quasilinear dynamics at unit-normalized rough data leaves the numerically
resolvable regime almost immediately (see the stability notes in
evolution).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import ifft, next_fast_len

from .evolution import EquationParams, SolverConfig, integrate_batch
from .fields import SpectralField, random_sobolev_data, sobolev_norm
from .rng import seed_stream

WELLPOSED_FLOOR = 35.0 / 64.0


# ---------------------------------------------------------------------------
# nonlinear smoothing


@dataclass(frozen=True)
class LadderPoint:
    N: int
    seed: int
    amplitude: float
    data_decay: float
    diff_decay: float
    gain: float
    fit_residual: float
    sup_diff_norm: float
    stable: bool


@dataclass(frozen=True)
class SmoothingReport:
    s: float
    epsilon_target: float
    params: tuple[float, float, float]
    amplitude: float
    n_ladder: tuple[int, ...]
    seeds: tuple[int, ...]
    points: tuple[LadderPoint, ...]
    mean_gain_by_n: dict[int, float]
    diff_norm_series: dict[int, np.ndarray] = field(repr=False)
    times: dict[int, np.ndarray] = field(repr=False)
    flags: tuple[str, ...] = ()

    @property
    def inconclusive(self) -> bool:
        return any(f in ("unstable", "poor-fit") for f in self.flags)


def tail_window(N: int) -> tuple[int, int]:
    """Fit window [N/8, N/4]: above the low-frequency transients and below
    the truncation boundary layer.

    Pilot profiles show the quasilinear dynamics corrupts the upper part of
    the spectrum at any stable amplitude (the trapped-layer feedback
    reaches down to ~0.3 N over a full run), so a window reaching N/2
    mixes the boundary layer into the fit and destabilizes it.
    """
    return max(2, N // 8), max(4, N // 4)


def fit_tail_decay(mode_abs: np.ndarray, N: int) -> tuple[float, float]:
    """Least-squares decay exponent d (|coeff(n)| ~ n^{-d}) of a half
    spectrum over the tail window, with the fit's rms residual."""
    lo, hi = tail_window(N)
    n = np.arange(lo, hi + 1, dtype=np.float64)
    y = np.asarray(mode_abs[lo : hi + 1], dtype=np.float64)
    good = y > 0
    if good.sum() < 5:
        return np.nan, np.inf
    x = np.log(n[good])
    z = np.log(y[good])
    coeffs, resid = np.polyfit(x, z, 1, full=True)[:2]
    rms = float(np.sqrt(resid[0] / good.sum())) if len(resid) else 0.0
    return float(-coeffs[0]), rms


def _free_phases(N: int, t: np.ndarray) -> np.ndarray:
    k5 = np.arange(N + 1, dtype=np.float64) ** 5
    return np.exp(1j * np.outer(t, k5))


def smoothing_report(
    s: float,
    params: EquationParams,
    cfg: SolverConfig,
    seeds,
    n_ladder: tuple[int, ...] | None = None,
    amplitude: float = 1.0,
    epsilon: float | None = None,
    residual_threshold: float = 0.75,
) -> SmoothingReport:
    """Measure the extra tail decay of the gauged solution minus the free
    evolution, averaged over seeds, for each truncation in the ladder.

    cfg supplies dt/T/filters for the largest N; smaller ladder entries
    reuse the same dt budget relative to N^3.  The free equation is its own
    transform (nothing to remove), so the difference vanishes identically
    and the report is flagged "linear".
    """
    if s <= WELLPOSED_FLOOR:
        import logging

        logging.getLogger(__name__).warning(
            "s=%g is at or below the well-posedness floor %g", s, WELLPOSED_FLOOR
        )
    seeds = tuple(int(x) for x in seeds)
    if n_ladder is None:
        n_ladder = (cfg.N,)
    n_ladder = tuple(sorted(n_ladder))
    eps = float(epsilon) if epsilon is not None else min(2 * s - 1 - 3 / 32, 1.0)

    if params.as_tuple() == (0.0, 0.0, 0.0):
        points = []
        series = {}
        times = {}
        for N in n_ladder:
            for seed in seeds:
                u0 = random_sobolev_data(s, N, seed_stream(seed, "smoothing-data"))
                d_data, r = fit_tail_decay(np.abs(u0.coeffs[N:]) * amplitude, N)
                points.append(
                    LadderPoint(N, seed, amplitude, d_data, np.nan, np.nan, r, 0.0, True)
                )
            series[N] = np.zeros(2)
            times[N] = np.array([0.0, cfg.T])
        return SmoothingReport(
            s, eps, params.as_tuple(), amplitude, n_ladder, seeds,
            tuple(points), {N: np.nan for N in n_ladder}, series, times,
            flags=("linear",),
        )

    points: list[LadderPoint] = []
    mean_gain: dict[int, float] = {}
    series: dict[int, np.ndarray] = {}
    all_times: dict[int, np.ndarray] = {}
    flags: list[str] = []
    dt_budget = cfg.dt * cfg.N**3

    for N in n_ladder:
        dt = dt_budget / N**3
        n_steps = max(2, round(cfg.T / dt))
        dt = cfg.T / n_steps
        stride = max(2, (n_steps // 128) // 2 * 2)
        H0 = np.stack(
            [
                amplitude
                * np.array(
                    random_sobolev_data(s, N, seed_stream(seed, "smoothing-data")).coeffs[N:]
                )
                for seed in seeds
            ]
        )
        snap_steps, snaps, cum_k, ok = integrate_batch(
            H0, params, dt, n_steps, stride, mode_filter=cfg.mode_filter
        )
        t = snap_steps * dt
        phases = _free_phases(N, t)  # (S, N+1)
        free = H0[:, None, :] * phases[None, :, :]
        gauge_mult = np.exp(
            np.arange(N + 1)[None, None, :] * (1j * cum_k.imag[:, :, None])
        )
        diff = snaps * gauge_mult - free
        # per-mode time-median: robust against single-step parametric
        # transients that a sup would freeze into the tail fit
        typ_mode = np.median(np.abs(diff), axis=1)  # (B, N+1)

        w = (1.0 + np.arange(N + 1, dtype=np.float64) ** 2) ** (s + eps)
        sq = np.abs(diff) ** 2
        sq[..., 1:] *= 2.0
        norms = np.sqrt(np.einsum("bsk,k->bs", sq, w))
        series[N] = norms.mean(axis=0)
        all_times[N] = t

        gains = []
        for b, seed in enumerate(seeds):
            d_data, _ = fit_tail_decay(np.abs(H0[b]), N)
            d_diff, resid = fit_tail_decay(typ_mode[b], N)
            gain = d_diff - d_data
            stable = bool(ok[b])
            if not stable:
                flags.append("unstable")
            elif resid > residual_threshold:
                flags.append("poor-fit")
            else:
                gains.append(gain)
            points.append(
                LadderPoint(
                    N, seed, amplitude, d_data, d_diff, gain, resid,
                    float(norms[b].max()), stable,
                )
            )
        mean_gain[N] = float(np.mean(gains)) if gains else np.nan

    return SmoothingReport(
        s, eps, params.as_tuple(), amplitude, n_ladder, seeds, tuple(points),
        mean_gain, series, all_times, tuple(sorted(set(flags))),
    )


def amplitude_scaling(
    s: float,
    params: EquationParams,
    cfg: SolverConfig,
    seeds,
    base_amplitude: float,
    lambdas: tuple[float, ...] = (1.0, 0.5, 0.25),
) -> dict:
    """Exponent of sup_t |gauged solution minus free flow| in H^s under
    data scaling, measured on the resolvable band |n| <= N/4 (the upper
    band carries the truncation boundary layer, whose amplitude scaling is
    not the Duhamel term's): at least quadratic for a quadratic flux.

    All scalings of all seeds integrate as one batch.
    """
    seeds = tuple(int(x) for x in seeds)
    N = cfg.N
    n_steps = max(2, round(cfg.T / cfg.dt))
    dt = cfg.T / n_steps
    stride = max(2, (n_steps // 64) // 2 * 2)
    base = np.stack(
        [
            np.array(random_sobolev_data(s, N, seed_stream(seed, "smoothing-data")).coeffs[N:])
            for seed in seeds
        ]
    )
    H0 = np.concatenate([lam * base_amplitude * base for lam in lambdas])
    snap_steps, snaps, cum_k, ok = integrate_batch(
        H0, params, dt, n_steps, stride, mode_filter=cfg.mode_filter
    )
    t = snap_steps * dt
    phases = _free_phases(N, t)
    free = H0[:, None, :] * phases[None, :, :]
    gauge_mult = np.exp(np.arange(N + 1)[None, None, :] * (1j * cum_k.imag[:, :, None]))
    diff = snaps * gauge_mult - free
    w = (1.0 + np.arange(N + 1, dtype=np.float64) ** 2) ** s
    w[N // 4 + 1 :] = 0.0
    sq = np.abs(diff) ** 2
    sq[..., 1:] *= 2.0
    norms = np.sqrt(np.einsum("bsk,k->bs", sq, w)).max(axis=1)  # sup_t per member
    per_lambda = norms.reshape(len(lambdas), len(seeds))
    sup = per_lambda.mean(axis=1)
    slope = np.polyfit(np.log(lambdas), np.log(sup), 1)[0]
    return {
        "lambdas": tuple(lambdas),
        "sup_diff": sup.tolist(),
        "exponent": float(slope),
        "stable": bool(ok.all()),
    }


# ---------------------------------------------------------------------------
# space-time L^8 ratio probe


@dataclass(frozen=True)
class ProbeRow:
    N: int
    family: str
    l8_norm: float
    sobolev: float
    ratio: float
    time_points: int
    converged: bool


@dataclass(frozen=True)
class StrichartzProbe:
    exponent: int
    a_test: float
    n_ladder: tuple[int, ...]
    rows: tuple[ProbeRow, ...]

    def ratios(self, family: str) -> list[float]:
        return [r.ratio for r in self.rows if r.family == family]


def dirichlet_field(N: int) -> SpectralField:
    """Mean-zero kernel with every coefficient 1 up to the truncation."""
    coeffs = np.ones(2 * N + 1, dtype=np.complex128)
    coeffs[N] = 0.0
    return SpectralField(N, coeffs)


def free_l8_norm(
    f: SpectralField,
    time_points: int = 256,
    tol: float = 0.01,
    max_points: int = 8192,
) -> tuple[float, int, bool]:
    """L^8 norm of the free evolution over the space-time torus with
    normalized measure: exact in space (the grid resolves |u|^8), uniform
    Riemann in time (the flow is 2 pi periodic), with the time grid doubled
    until the norm moves less than tol or the point budget is exhausted."""
    N = f.N
    m = next_fast_len(8 * N + 2)
    modes = np.arange(-N, N + 1)
    k5 = modes.astype(np.float64) ** 5
    idx = modes % m

    # Offsetting the grid by an irrational fraction keeps the nodes off the
    # rational revival times; a 2-adic grid would sample exactly the times
    # where the evolution refocuses and bias the integral upward.
    offset = 0.5 * (np.sqrt(5.0) - 1.0)

    def mean_eighth(tp: int) -> float:
        total = 0.0
        for start in range(0, tp, 512):
            j = np.arange(start, min(start + 512, tp), dtype=np.float64)
            t = (j + offset) * (2.0 * np.pi / tp)
            spec = np.zeros((len(t), m), dtype=np.complex128)
            spec[:, idx] = f.coeffs * np.exp(1j * np.outer(t, k5))
            u = ifft(spec * m, axis=-1)
            total += float(np.sum(np.mean((u.real**2 + u.imag**2) ** 4, axis=-1)))
        return total / tp

    tp = time_points
    value = mean_eighth(tp) ** 0.125
    converged = False
    while tp < max_points:
        nxt = mean_eighth(2 * tp) ** 0.125
        tp *= 2
        moved = abs(nxt - value)
        value = nxt
        if moved <= tol * max(value, 1e-300):
            converged = True
            break
    return value, tp, converged


def strichartz_probe(
    a_test: float,
    n_ladder=(32, 64, 128, 256, 512),
    seeds=(0,),
    time_points: int = 256,
) -> StrichartzProbe:
    """Ratio ladder ||free flow||_{L^8} / ||f||_{H^{a+0.01}} for the kernel
    family and seeded rough-data families."""
    if a_test < 0:
        raise ValueError("a_test must be nonnegative")
    rows = []
    for N in n_ladder:
        fams: list[tuple[str, SpectralField]] = [("dirichlet", dirichlet_field(N))]
        for seed in seeds:
            fams.append(
                (
                    f"random-s{seed}",
                    random_sobolev_data(a_test, N, seed_stream(seed, "strichartz")),
                )
            )
        for name, f in fams:
            l8, tp, conv = free_l8_norm(f, time_points=time_points)
            hs = sobolev_norm(f, a_test + 0.01)
            rows.append(ProbeRow(N, name, l8, hs, l8 / hs, tp, conv))
    return StrichartzProbe(8, a_test, tuple(n_ladder), tuple(rows))
