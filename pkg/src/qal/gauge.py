"""Invertible changes of variables along trajectories.

All transforms here are per-mode multipliers of modulus one, hence exact
isometries of every Sobolev norm: the free-propagator conjugation
v_hat(n) = e^{-i t n^5} u_hat(n), and the mean-flux gauge that multiplies
mode n by e^{n K_int} for the purely imaginary running integral K_int of
K(u) = (4i/5) * (L^2 norm squared).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .fields import SpectralField

K_REAL_TOL = 1e-12


@dataclass(frozen=True)
class GaugePhase:
    """K(t) sampled on the solver's accepted-step grid, with the running
    quadrature of its time integral.

    cumulative[i] approximates the integral of K over [times[0], times[i]]
    by composite Simpson; an odd trailing panel is closed with one
    trapezoid.
    """

    times: np.ndarray
    k_samples: np.ndarray
    cumulative: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        k = np.asarray(self.k_samples, dtype=np.complex128)
        c = np.asarray(self.cumulative, dtype=np.complex128)
        if not (t.shape == k.shape == c.shape):
            raise ValueError("times, k_samples, cumulative must align")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "k_samples", k)
        object.__setattr__(self, "cumulative", c)

    @classmethod
    def from_samples(cls, times, k_samples) -> "GaugePhase":
        times = np.asarray(times, dtype=np.float64)
        k_samples = np.asarray(k_samples, dtype=np.complex128)
        return cls(times, k_samples, cumulative_quadrature(times, k_samples))


def cumulative_quadrature(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Prefix integrals of uniformly sampled values: composite Simpson to
    each even index, one trapezoid panel to close each odd index."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values)
    m = len(times)
    if m != len(values):
        raise ValueError("times and values must have equal length")
    out = np.zeros(m, dtype=np.complex128)
    if m < 2:
        return out
    h = np.diff(times)
    if h.min() <= 0:
        raise ValueError("times must be strictly increasing")
    if m > 2 and (h.max() - h.min()) > 1e-9 * h.max():
        raise ValueError("quadrature grid must be uniform")
    dt = float(h[0])
    # Simpson pair panels land on even indices
    pair = dt / 3.0 * (values[0:-2:2] + 4.0 * values[1:-1:2] + values[2::2])
    out[2::2] = np.cumsum(pair)
    # odd indices: previous even prefix plus one trapezoid panel
    out[1::2] = out[0:-1:2] + dt / 2.0 * (values[0:-1:2] + values[1::2])
    return out


def interaction_picture(u: SpectralField, t: float) -> SpectralField:
    """Conjugation by the free propagator: mode n picks up e^{-i t n^5}.

    The inverse is the same map with -t; every Sobolev norm is invariant.
    """
    n = u.modes.astype(np.float64)
    phase = np.exp(-1j * t * n**5)
    return SpectralField(u.N, phase * u.coeffs)


def k_functional(v: SpectralField) -> complex:
    """(4i/5) times the squared L^2 norm (normalized measure): the mean
    quadratic flux whose removal defines the gauge.  Purely imaginary for
    real fields."""
    if not v.is_hermitian(tol=1e-9):
        raise ValueError("K is defined for real (Hermitian-symmetric) fields")
    return 0.8j * float(np.sum(np.abs(v.coeffs) ** 2))


def apply_k_gauge(
    f: SpectralField, cumulative_k: complex, direction: str = "forward"
) -> SpectralField:
    """Multiply mode n by e^{+n K_int} (forward) or e^{-n K_int} (inverse).

    K_int must be purely imaginary: that is what makes the multiplier
    unimodular and the map an H^s isometry.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    scale = max(1.0, abs(cumulative_k))
    if abs(cumulative_k.real) > K_REAL_TOL * scale:
        raise ValueError(
            f"cumulative K has real part {cumulative_k.real:.3e}; "
            "a non-imaginary gauge exponent would break the isometry"
        )
    sign = 1.0 if direction == "forward" else -1.0
    exponent = sign * 1j * cumulative_k.imag
    mult = np.exp(f.modes * exponent)
    return SpectralField(f.N, mult * f.coeffs)


def tilde_transform(traj, direction: str = "forward"):
    """Apply the K-gauge snapshot by snapshot along a trajectory, using the
    recorded K series; returns a trajectory of equal layout.

    Snapshot norms are preserved exactly in every H^s; at t = 0 the field
    is unchanged.
    """
    gauge = getattr(traj, "gauge", None)
    if gauge is None or len(gauge.times) == 0:
        raise ValueError("trajectory carries no recorded K series")
    cum = np.interp(traj.times, gauge.times, gauge.cumulative.imag)
    snapshots = tuple(
        apply_k_gauge(field, 1j * c, direction)
        for field, c in zip(traj.snapshots, cum)
    )
    return dataclasses.replace(traj, snapshots=snapshots)
