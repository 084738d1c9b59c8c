"""
One-dimensional complex spectral amplitudes on uniform angular-frequency grids.

Integrals over frequency are Riemann sums with uniform weight ``spacing``;
"normalized" always means ``sum(|v|^2) * spacing == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.polynomial.hermite import hermval
from scipy.constants import c, epsilon_0
from scipy.special import gammaln

from .errors import CoverageError, DegeneratePumpError, GridError, TruncationError

SPECTRUM_HEADER = "# spectral-amplitude v1"
MAX_HG_ORDER = 10


def sigma_from_fwhm(fwhm_duration: float) -> float:
    """Spectral amplitude width (rad/s) of a transform-limited Gaussian pulse.

    The duration is the intensity FWHM in time; the amplitude spectrum is
    ``exp(-(w - w0)^2 / (2 sigma^2))``.
    """
    return 2 * math.sqrt(math.log(2)) / fwhm_duration


def fwhm_from_sigma(sigma: float) -> float:
    return 2 * math.sqrt(math.log(2)) / sigma


@dataclass(frozen=True)
class FrequencyGrid:
    center: float
    spacing: float
    count: int

    def __post_init__(self):
        if self.count < 8:
            raise GridError(f"grid needs at least 8 samples, got {self.count}")
        if not self.spacing > 0:
            raise GridError("grid spacing must be positive")
        if self.center - (self.count // 2) * self.spacing <= 0:
            raise GridError("grid extends to non-positive frequencies")

    @classmethod
    def spanning(cls, center: float, half_width: float, count: int) -> "FrequencyGrid":
        """Grid of ``count`` points whose samples cover ``center +- half_width``."""
        spacing = 2 * half_width / (count - 2)
        return cls(center, spacing, count)

    @property
    def omega(self) -> np.ndarray:
        return self.center + (np.arange(self.count) - self.count // 2) * self.spacing

    @property
    def bounds(self) -> tuple[float, float]:
        w = self.omega
        return float(w[0]), float(w[-1])

    def half_span(self) -> float:
        """Smallest distance from the center to either grid end."""
        lo, hi = self.bounds
        return min(self.center - lo, hi - self.center)

    def refined(self, factor: int = 2) -> "FrequencyGrid":
        """Same span, ``factor`` times denser."""
        return FrequencyGrid(self.center, self.spacing / factor, self.count * factor)

    def to_dict(self) -> dict:
        return {"center": self.center, "spacing": self.spacing, "count": self.count}


@dataclass(frozen=True, eq=False)
class SpectralAmplitude:
    grid: FrequencyGrid
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.count,):
            raise GridError(f"expected {self.grid.count} samples, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def omega(self) -> np.ndarray:
        return self.grid.omega

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)) * self.grid.spacing)

    def normalized(self) -> "SpectralAmplitude":
        return SpectralAmplitude(self.grid, self.values / self.norm(), self.label)

    def integral(self) -> complex:
        return complex(np.sum(self.values) * self.grid.spacing)

    def __call__(self, omega) -> np.ndarray:
        """Linear interpolation; raises CoverageError outside the grid."""
        omega = np.asarray(omega, dtype=float)
        lo, hi = self.grid.bounds
        tol = 1e-9 * self.grid.spacing
        if omega.size and (omega.min() < lo - tol or omega.max() > hi + tol):
            raise CoverageError(
                f"{self.label or 'spectrum'} sampled on [{lo:.6g}, {hi:.6g}] rad/s but "
                f"[{omega.min():.6g}, {omega.max():.6g}] rad/s is required")
        x = (omega - lo) / self.grid.spacing
        k = np.clip(np.floor(x).astype(int), 0, self.grid.count - 2)
        t = x - k
        v = self.values
        return (1 - t) * v[k] + t * v[k + 1]

    def peak_omega(self) -> float:
        return float(self.omega[np.argmax(np.abs(self.values))])


def _check_support(grid: FrequencyGrid, omega0: float, half_width: float, what: str):
    lo, hi = grid.bounds
    if omega0 - half_width < lo or omega0 + half_width > hi:
        need = 2 * half_width
        raise TruncationError(
            f"{what} needs [{omega0 - half_width:.6g}, {omega0 + half_width:.6g}] rad/s "
            f"(span {need:.4g} rad/s) but the grid covers [{lo:.6g}, {hi:.6g}]")


def _hg_half_width(order: int, sigma: float) -> float:
    # order 0 needs +-5 sigma; higher orders reach out to ~sqrt(2n+1) sigma further
    return (4 + math.sqrt(2 * order + 1)) * sigma


def hermite_gauss_values(omega, order: int, omega0: float, sigma: float) -> np.ndarray:
    """Analytically normalized Hermite-Gauss function of the given order."""
    x = (np.asarray(omega, dtype=float) - omega0) / sigma
    coef = np.zeros(order + 1)
    coef[order] = 1.0
    log_norm = -0.5 * (order * math.log(2) + gammaln(order + 1) + 0.5 * math.log(math.pi) + math.log(sigma))
    return math.exp(log_norm) * hermval(x, coef) * np.exp(-x ** 2 / 2)


def hermite_gauss_spectrum(grid: FrequencyGrid, order: int, omega0: float, sigma: float,
                           label: str = "") -> SpectralAmplitude:
    if not 0 <= order <= MAX_HG_ORDER:
        raise ValueError(f"Hermite-Gauss order must be in 0..{MAX_HG_ORDER}")
    _check_support(grid, omega0, _hg_half_width(order, sigma), f"HG{order} spectrum")
    values = hermite_gauss_values(grid.omega, order, omega0, sigma)
    return SpectralAmplitude(grid, values, label or f"HG{order}").normalized()


def gaussian_spectrum(grid: FrequencyGrid, omega0: float, fwhm_duration: float,
                      label: str = "gaussian") -> SpectralAmplitude:
    sigma = sigma_from_fwhm(fwhm_duration)
    _check_support(grid, omega0, 5 * sigma, "Gaussian spectrum")
    values = np.exp(-(grid.omega - omega0) ** 2 / (2 * sigma ** 2))
    return SpectralAmplitude(grid, values, label).normalized()


def overlap(a: SpectralAmplitude, b: SpectralAmplitude) -> complex:
    """<a|b> = sum conj(a) b dw."""
    if a.grid != b.grid:
        raise GridError("overlap of amplitudes sampled on different grids")
    return complex(np.vdot(a.values, b.values) * a.grid.spacing)


def pump_amplitude_scale(peak_power: float, alpha: SpectralAmplitude, n_p: float) -> float:
    """Field amplitude A_p that makes a pulse with spectrum ``alpha`` carry ``peak_power``."""
    if not peak_power > 0:
        raise ValueError("peak power must be positive")
    integral_sq = abs(alpha.integral()) ** 2
    scale = float(np.sum(np.abs(alpha.values))) * alpha.grid.spacing
    if integral_sq <= (1e-10 * scale) ** 2:
        raise DegeneratePumpError("pump spectrum integrates to zero (odd-symmetric shape?)")
    return math.sqrt(2 * peak_power / (c * epsilon_0 * n_p * integral_sq))


def time_domain_fwhm(amp: SpectralAmplitude, pad: int = 8) -> float:
    """Intensity FWHM (s) of the pulse whose spectrum is ``amp``, via zero-padded FFT."""
    n = amp.grid.count * pad
    field = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(
        np.pad(amp.values, ((n - amp.grid.count) // 2,) * 2))))
    intensity = np.abs(field) ** 2
    dt = 2 * np.pi / (n * amp.grid.spacing)
    half = intensity.max() / 2
    above = np.flatnonzero(intensity >= half)
    i0, i1 = above[0], above[-1]

    def cross(i, j):
        # linear interpolation between samples i (below) and j (above)
        return i + (half - intensity[i]) / (intensity[j] - intensity[i]) * (j - i)

    left = cross(i0 - 1, i0)
    right = cross(i1 + 1, i1)
    return (right - left) * dt


def write_spectral_amplitude(amp: SpectralAmplitude, path) -> None:
    data = np.column_stack([amp.omega, amp.values.real, amp.values.imag])
    header = f"{SPECTRUM_HEADER[2:]}\nlabel: {amp.label}\nomega_rad_s re im"
    np.savetxt(path, data, header=header, fmt="%.17g")


def read_spectral_amplitude(path) -> SpectralAmplitude:
    path = Path(path)
    with path.open() as fh:
        first = fh.readline().strip()
        second = fh.readline().strip()
    if first != SPECTRUM_HEADER:
        raise GridError(f"{path}: expected header {SPECTRUM_HEADER!r}, got {first!r}")
    label = second.split(":", 1)[1].strip() if second.startswith("# label:") else ""
    data = np.loadtxt(path, comments="#", ndmin=2)
    omega = data[:, 0]
    steps = np.diff(omega)
    spacing = float(np.mean(steps))
    if np.max(np.abs(steps - spacing)) > 1e-6 * spacing:
        raise GridError(f"{path}: frequency column is not uniformly spaced")
    count = len(omega)
    grid = FrequencyGrid(float(omega[count // 2]), spacing, count)
    return SpectralAmplitude(grid, data[:, 1] + 1j * data[:, 2], label)
