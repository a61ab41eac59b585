"""Box-counting dimension of solution graphs and rational-time revivals.

The box counter is the column-interval variant: each eps-column of the
plane is charged with every eps-cell met by the polyline graph, including
cells crossed by vertical excursions between adjacent samples.  Rational
times of the free flow are handled in exact integer arithmetic: when the
denominator divides 30, fifth powers reduce to first powers modulo q and
the evolution is an exact translation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import SpectralField, to_samples

RESOLUTION_GUARD = 4  # eps must cover at least this many grid spacings


@dataclass(frozen=True)
class GraphSamples:
    """Uniformly sampled graph of a real function on the torus."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise ValueError("xs and ys must be equal-length 1-d arrays")
        if len(xs) < 2**12:
            raise ValueError(f"need at least {2**12} samples, got {len(xs)}")
        dx = np.diff(xs)
        if dx.min() <= 0 or (dx.max() - dx.min()) > 1e-9 * dx.max():
            raise ValueError("xs must be strictly increasing and uniform")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def spacing(self) -> float:
        return float(self.xs[1] - self.xs[0])


def sample_function(fn, count: int = 2**13) -> GraphSamples:
    xs = np.arange(count) * (2.0 * np.pi / count)
    return GraphSamples(xs, np.asarray(fn(xs), dtype=np.float64))


def sample_field(f: SpectralField, count: int = 2**13, part: str = "re") -> GraphSamples:
    """Samples of the real or imaginary part of the (possibly complex)
    profile with coefficients f; either part is a real field with its own
    Hermitian coefficient vector."""
    xs = np.arange(count) * (2.0 * np.pi / count)
    c = f.coeffs
    if part == "re":
        herm = 0.5 * (c + np.conj(c[::-1]))
    elif part == "im":
        herm = (c - np.conj(c[::-1])) / 2j
    else:
        raise ValueError("part must be 're' or 'im'")
    ys = to_samples(SpectralField(f.N, herm), count)
    return GraphSamples(xs, ys)


def weierstrass(a: float = 0.5, b: int = 3, terms: int = 20):
    """Classical lacunary cosine series; its graph has box dimension
    2 + log(a)/log(b) (about 1.369 for a = 1/2, b = 3)."""

    def fn(x):
        out = np.zeros_like(x)
        for k in range(terms):
            out += a**k * np.cos(b**k * x)
        return out

    return fn


def box_count(g: GraphSamples, eps: float) -> int:
    """Number of eps-cells met by the graph, counted column by column with
    the vertical span of every polyline segment charged to the columns it
    crosses.  The wrap-around segment closes the periodic graph."""
    if eps < RESOLUTION_GUARD * g.spacing:
        raise ValueError(
            f"eps={eps:g} below the resolution guard "
            f"{RESOLUTION_GUARD}*spacing={RESOLUTION_GUARD * g.spacing:g}"
        )
    xs, ys = g.xs, g.ys
    period = 2.0 * np.pi
    ncols = int(np.ceil(period / eps))
    x0 = np.concatenate([xs, xs[-1:] + g.spacing]) % period
    y_seg_lo = np.minimum(ys, np.roll(ys, -1))
    y_seg_hi = np.maximum(ys, np.roll(ys, -1))
    c_start = np.minimum((x0[:-1] / eps).astype(np.int64), ncols - 1)
    c_end = np.minimum((x0[1:] / eps).astype(np.int64), ncols - 1)

    col_lo = np.full(ncols, np.inf)
    col_hi = np.full(ncols, -np.inf)
    for cols in (c_start, c_end):
        np.minimum.at(col_lo, cols, y_seg_lo)
        np.maximum.at(col_hi, cols, y_seg_hi)
    occupied = col_hi >= col_lo
    cells = (
        np.floor(col_hi[occupied] / eps) - np.floor(col_lo[occupied] / eps) + 1
    )
    return int(cells.sum())


@dataclass(frozen=True)
class DimensionEstimate:
    eps: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float
    fit_window: tuple[int, int]
    residual: float


def dyadic_eps_ladder(g: GraphSamples, levels: int = 12) -> list[float]:
    """Dyadic eps values from 2 pi / 8 down to the resolution guard.

    Starting below the domain scale keeps the post-exclusion fit window out
    of the single-oscillation regime where every graph looks rectifiable.
    """
    out = []
    eps = 2.0 * np.pi / 8.0
    for _ in range(levels):
        if eps < RESOLUTION_GUARD * g.spacing:
            break
        out.append(eps)
        eps /= 2.0
    return out


def fit_dimension(g: GraphSamples, eps_ladder=None) -> DimensionEstimate:
    """Box-count slope of log N(eps) against log(1/eps) over the ladder,
    excluding the two coarsest and two finest values (plateau and
    resolution artifacts)."""
    if eps_ladder is None:
        eps_ladder = dyadic_eps_ladder(g)
    eps = sorted((float(e) for e in eps_ladder), reverse=True)
    if len(eps) < 6:
        raise ValueError(f"need a ladder of at least 6 eps values, got {len(eps)}")
    counts = [box_count(g, e) for e in eps]
    lo, hi = 2, len(eps) - 2
    x = np.log(1.0 / np.array(eps[lo:hi]))
    y = np.log(np.array(counts[lo:hi], dtype=np.float64))
    coeffs, resid = np.polyfit(x, y, 1, full=True)[:2]
    rms = float(np.sqrt(resid[0] / len(x))) if len(resid) else 0.0
    return DimensionEstimate(
        tuple(eps), tuple(counts), float(coeffs[0]), (lo, hi), rms
    )


# ---------------------------------------------------------------------------
# rational-time revivals


def _rational_multiplier(N: int, p: int, q: int, power: int) -> np.ndarray:
    """e^{2 pi i p n^power / q} for n = -N..N, with n^power reduced mod q
    in exact integers before any floating point."""
    residues = np.array(
        [(p * pow(int(n), power, q)) % q for n in range(-N, N + 1)],
        dtype=np.float64,
    )
    return np.exp((2j * np.pi / q) * residues)


def talbot_snapshot(g: SpectralField, p: int, q: int) -> SpectralField:
    """Free flow at time 2 pi p / q, phases computed exactly mod q.

    When q divides 30, n^5 = n mod q, so the result equals the exact
    translate of g by 2 pi p / q (bitwise: both paths reduce to the same
    integers).
    """
    if q < 1:
        raise ValueError("q must be positive")
    if math.gcd(abs(p), q) != 1 and p != 0:
        raise ValueError(f"p/q = {p}/{q} must be in lowest terms")
    return SpectralField(g.N, _rational_multiplier(g.N, p, q, 5) * g.coeffs)


def translate_exact(g: SpectralField, p: int, q: int) -> SpectralField:
    """Translate x -> x + 2 pi p / q via the first-power multiplier, on the
    same exact mod-q code path as talbot_snapshot."""
    if q < 1:
        raise ValueError("q must be positive")
    return SpectralField(g.N, _rational_multiplier(g.N, p, q, 1) * g.coeffs)


def free_evolution(g: SpectralField, t: float) -> SpectralField:
    """Free flow at an arbitrary real time; fifth powers are carried in
    extended precision so the phase of the top mode stays accurate for
    N up to about 1024."""
    n = g.modes.astype(np.longdouble)
    phase = np.exp(1j * np.array(np.longdouble(t) * n**5 % (2 * np.longdouble(np.pi)), dtype=np.float64))
    return SpectralField(g.N, phase * g.coeffs)


def step_profile(N: int) -> SpectralField:
    """Mean-zero square wave (bounded variation, H^{1/2-} roughness): the
    canonical revival/fractality test profile."""
    coeffs = np.zeros(2 * N + 1, dtype=np.complex128)
    for n in range(1, N + 1, 2):
        c = 2.0 / (1j * np.pi * n)
        coeffs[N + n] = c
        coeffs[N - n] = np.conj(c)
    return SpectralField(N, coeffs)


def dimension_band(s: float) -> tuple[float, float]:
    """Advisory band for the graph dimension of solutions with data of
    regularity s: lower edge 2 - s, piecewise upper edge."""
    if s <= 35 / 64 or s >= 1:
        raise ValueError("band defined for 35/64 < s < 1")
    if s <= 263 / 480:
        upper = 115 / 32 - 3 * s
    elif s <= 11 / 20:
        upper = 39 / 20
    else:
        upper = 5 / 2 - s
    return 2.0 - s, upper


def dimension_of_solution(
    traj, t: float, sample_count: int = 2**14, epsilon: float | None = None
) -> dict:
    """Dimension estimates at the snapshot nearest t for the gauged field
    and for its difference from the free flow, real and imaginary parts.

    The snapshot is carried to t by the free flow (interpolation in the
    propagator frame); the comparison with the regularity band is advisory.
    """
    from .gauge import apply_k_gauge

    if not (traj.times[0] - 1e-12 <= t <= traj.times[-1] + 1e-12):
        raise ValueError(f"t={t} outside the trajectory range")
    idx = int(np.argmin(np.abs(traj.times - t)))
    snap = traj.snapshots[idx]
    t0 = float(traj.times[idx])
    u = free_evolution(snap, t - t0) if t != t0 else snap
    cum = complex(np.interp(t0, traj.gauge.times, traj.gauge.cumulative.imag) * 1j)
    tilde = apply_k_gauge(u, cum, "forward")
    u0 = traj.snapshots[0]
    free = free_evolution(u0, t)
    diff = SpectralField(u0.N, tilde.coeffs - free.coeffs)

    out: dict = {"t": t}
    for label, fld in (("tilde", tilde), ("difference", diff)):
        scale = float(np.max(np.abs(fld.coeffs)))
        c = fld.coeffs
        parts = {
            "re": 0.5 * (c + np.conj(c[::-1])),
            "im": (c - np.conj(c[::-1])) / 2j,
        }
        for part, herm in parts.items():
            if float(np.max(np.abs(herm))) <= 1e-12 * max(scale, 1e-300):
                out[f"{label}_{part}"] = None
                continue
            g = sample_field(fld, sample_count, part)
            out[f"{label}_{part}"] = fit_dimension(g)
    return out
