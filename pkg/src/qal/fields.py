"""Real periodic fields represented by truncated Fourier coefficients.

A field u on the torus is stored as the dense complex vector of coefficients
u_hat(n) for n = -N..N, with u(x) = sum_n u_hat(n) e^{inx}.  Real fields are
Hermitian-symmetric: u_hat(-n) = conj(u_hat(n)).  All integrals over the
torus carry the normalized measure dx/(2pi), so Plancherel reads
sum |u_hat(n)|^2 = mean over x of |u(x)|^2 with no stray constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class SpectralField:
    """Truncated coefficient vector of a real field on the torus.

    coeffs[k] holds u_hat(k - N) for k = 0..2N; the mean sits in the middle
    slot (n = 0).  Instances are immutable; operations return new fields.
    """

    N: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"truncation radius must be >= 1, got {self.N}")
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (2 * self.N + 1,):
            raise ValueError(
                f"coeffs must have shape ({2 * self.N + 1},), got {c.shape}"
            )
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def mean(self) -> complex:
        return complex(self.coeffs[self.N])

    def coeff(self, n: int) -> complex:
        if abs(n) > self.N:
            return 0.0j
        return complex(self.coeffs[n + self.N])

    @property
    def modes(self) -> np.ndarray:
        """Integer mode numbers -N..N matching the coeffs layout."""
        return np.arange(-self.N, self.N + 1)

    def hermitian_defect(self) -> float:
        """Largest |coeff(-n) - conj(coeff(n))|; 0 for a real field."""
        c = self.coeffs
        return float(np.max(np.abs(c[::-1] - np.conj(c))))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        return self.hermitian_defect() <= tol * scale


def zero_field(N: int) -> SpectralField:
    return SpectralField(N, np.zeros(2 * N + 1, dtype=np.complex128))


def field_from_modes(N: int, modes: dict[int, complex]) -> SpectralField:
    """Field with the given coefficients, Hermitian partners filled in.

    Modes listed with both signs must already be consistent; a mode given
    only with one sign gets its conjugate partner set automatically.
    """
    coeffs = np.zeros(2 * N + 1, dtype=np.complex128)
    for n, c in modes.items():
        if abs(n) > N:
            raise ValueError(f"mode {n} outside truncation radius {N}")
        coeffs[n + N] = c
        if -n not in modes:
            coeffs[-n + N] = np.conj(c)
    f = SpectralField(N, coeffs)
    if not f.is_hermitian():
        raise ValueError("inconsistent mode pairs break Hermitian symmetry")
    return f


def cosine_field(N: int, k: int = 1, amplitude: float = 1.0) -> SpectralField:
    """amplitude * cos(k x) as a SpectralField."""
    return field_from_modes(N, {k: amplitude / 2.0})


def sobolev_norm(f: SpectralField, s: float) -> float:
    """H^s norm: (sum <n>^{2s} |u_hat(n)|^2)^{1/2}, <n> = (1+n^2)^{1/2}.

    s = 0 recovers the L^2 norm under the dx/(2pi) normalization.
    """
    weights = (1.0 + f.modes.astype(np.float64) ** 2) ** s
    return float(np.sqrt(np.sum(weights * np.abs(f.coeffs) ** 2)))


def project_modes(f: SpectralField, M: int) -> SpectralField:
    """Zero every coefficient with |n| > M (sharp frequency truncation)."""
    if M < 1:
        raise ValueError(f"projection radius must be >= 1, got {M}")
    if M >= f.N:
        return SpectralField(f.N, f.coeffs)
    keep = np.abs(f.modes) <= M
    return SpectralField(f.N, np.where(keep, f.coeffs, 0.0))


def project_mean_zero(f: SpectralField) -> SpectralField:
    coeffs = np.array(f.coeffs)
    coeffs[f.N] = 0.0
    return SpectralField(f.N, coeffs)


def random_sobolev_data(s: float, N: int, seed) -> SpectralField:
    """Random mean-zero real field with |u_hat(n)| = |n|^{-s-1/2}.

    Phases are uniform; the field lands in H^{s'} exactly for s' < s.
    ``seed`` may be an int or a numpy Generator; a fixed seed gives a
    bitwise-identical field.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=N)
    n = np.arange(1, N + 1, dtype=np.float64)
    positive = n ** (-s - 0.5) * np.exp(1j * phases)
    coeffs = np.zeros(2 * N + 1, dtype=np.complex128)
    coeffs[N + 1 :] = positive
    coeffs[:N] = np.conj(positive[::-1])
    return SpectralField(N, coeffs)


def grid_size(N: int) -> int:
    """Sampling grid length: at least 2(2N+1) points, transform-friendly, even."""
    m = next_fast_len(2 * (2 * N + 1), real=True)
    if m % 2:
        m = next_fast_len(m + 1, real=True)
    return m


def grid_points(m: int) -> np.ndarray:
    return np.arange(m) * (2.0 * np.pi / m)


def to_samples(f: SpectralField, m: int | None = None) -> np.ndarray:
    """Values u(x_j) on the uniform grid x_j = 2 pi j / m (real array).

    Requires m > 2N so that synthesis is exact; defaults to grid_size(N).
    """
    if m is None:
        m = grid_size(f.N)
    if m <= 2 * f.N:
        raise ValueError(f"grid length {m} cannot resolve modes up to {f.N}")
    half = np.zeros(m // 2 + 1, dtype=np.complex128)
    half[: f.N + 1] = f.coeffs[f.N :]
    return irfft(half * m, n=m)


def from_samples(samples: np.ndarray, N: int) -> SpectralField:
    """Coefficients u_hat(n), |n| <= N, from real samples on a uniform grid."""
    samples = np.asarray(samples, dtype=np.float64)
    m = samples.shape[-1]
    if m <= 2 * N:
        raise ValueError(f"{m} samples cannot resolve modes up to {N}")
    half = rfft(samples) / m
    coeffs = np.zeros(2 * N + 1, dtype=np.complex128)
    coeffs[N:] = half[: N + 1]
    coeffs[:N] = np.conj(half[1 : N + 1][::-1])
    return SpectralField(N, coeffs)


def field_to_dict(f: SpectralField) -> dict:
    """JSON-ready form: {"N": int, "coeffs": [[re, im], ...]} for n = -N..N."""
    return {
        "N": f.N,
        "coeffs": [[float(c.real), float(c.imag)] for c in f.coeffs],
    }


def field_from_dict(d: dict) -> SpectralField:
    N = int(d["N"])
    pairs = d["coeffs"]
    if len(pairs) != 2 * N + 1:
        raise ValueError(f"expected {2 * N + 1} coefficient pairs, got {len(pairs)}")
    coeffs = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    return SpectralField(N, coeffs)
