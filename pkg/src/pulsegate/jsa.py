"""
Joint spectral amplitudes of sum- and difference-frequency conversion.

The JSA on an (input x output) frequency grid is the product of the pump
amplitude evaluated at the energy-conserving pump frequency and the
phasematching function, divided by its L2 norm ``N``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy.constants import c

from . import dispersion as disp
from .dispersion import Flavor, Role, WaveSpec, _as_enum
from .errors import ConfigError, EmptyJSAError, GridError
from .spatial import effective_area
from .spectra import (FrequencyGrid, SpectralAmplitude, _hg_half_width, hermite_gauss_spectrum,
                      read_spectral_amplitude, sigma_from_fwhm)

GAUSS_PM_COEFF = 0.193
# sinc^2(x) = 1/2 at x = 1.3916; the "phasematching bandwidth" below is this half width
SINC_HWHM = 1.3915573
# first-order QPM factor 2/pi times d33 = 25.2 pm/V, reduced tenfold for the
# cross-polarized (o-e-o) interaction; D_EFF_D31 is the d31-based alternative
D33 = 25.2e-12
D_EFF_D31 = 4.6e-12 * 2 / math.pi
DEFAULT_D_EFF = D33 * 2 / math.pi / 10
JSA_HEADER = "# jsa v1"


@dataclass(frozen=True)
class PumpShape:
    """Descriptor of the pump spectral amplitude.

    A Hermite-Gauss function of ``order`` whose order-0 member has intensity
    FWHM duration ``fwhm_duration``; or, if ``path`` is set, a spectrum read
    from a ``# spectral-amplitude v1`` file (absolute frequencies).
    """

    order: int = 0
    fwhm_duration: float = 300e-15
    path: str | None = None

    @property
    def sigma(self) -> float:
        return sigma_from_fwhm(self.fwhm_duration)

    def half_support(self) -> float:
        if self.path:
            amp = read_spectral_amplitude(self.path)
            lo, hi = amp.grid.bounds
            return 0.5 * (hi - lo)
        return _hg_half_width(self.order, self.sigma) + self.sigma

    def realize(self, grid: FrequencyGrid, omega0: float) -> SpectralAmplitude:
        if self.path:
            src = read_spectral_amplitude(self.path)
            lo, hi = src.grid.bounds
            w = grid.omega
            inside = (w >= lo) & (w <= hi)
            values = np.zeros(grid.count, dtype=complex)
            values[inside] = src(w[inside])
            return SpectralAmplitude(grid, values, src.label or "pump").normalized()
        return hermite_gauss_spectrum(grid, self.order, omega0, self.sigma, label=f"pump HG{self.order}")


@dataclass(frozen=True)
class ProcessSpec:
    """Complete physical description of one conversion process."""

    flavor: Flavor
    pump: WaveSpec
    input: WaveSpec
    output: WaveSpec | None = None
    models: Mapping | None = None
    length: float = 10e-3
    temperature: float = disp.DEFAULT_TEMPERATURE
    poling_period: float | str = "auto"
    d_eff: float = DEFAULT_D_EFF
    a_eff: float | None = 64e-12
    profiles: tuple | None = None
    pump_shape: PumpShape = field(default_factory=PumpShape)
    pump_peak_power: float = 22.0
    rep_rate: float = 76e6
    input_duration: float = 300e-15
    effective_indices: tuple | None = None
    calibration: float = 1.0

    def __post_init__(self):
        flavor = _as_enum(Flavor, self.flavor)
        object.__setattr__(self, "flavor", flavor)
        lam_o = disp.output_wavelength(flavor, self.input.center_wavelength, self.pump.center_wavelength)
        if self.output is None:
            axis = self.input.polarization_axis
            object.__setattr__(self, "output", WaveSpec(lam_o, axis, Role.OUTPUT))
        elif abs(self.output.center_wavelength - lam_o) > 1e-3 * lam_o:
            raise ConfigError(
                f"output wavelength {self.output.center_wavelength * 1e9:.2f} nm violates energy "
                f"conservation ({lam_o * 1e9:.2f} nm expected)")
        if not self.length > 0:
            raise ConfigError("waveguide length must be positive")
        if not self.d_eff > 0:
            raise ConfigError("d_eff must be positive")
        if self.a_eff is not None and not self.a_eff > 0:
            raise ConfigError("a_eff must be positive")
        if self.models is None:
            models = {w.role: disp.congruent_ln(w.polarization_axis, self.temperature)
                      for w in (self.pump, self.input, self.output)}
        else:
            models = {_as_enum(Role, k): v for k, v in self.models.items()}
            if set(models) != set(Role):
                raise ConfigError("models must cover pump, input and output")
        object.__setattr__(self, "models", models)

    # -- derived quantities --------------------------------------------------

    @property
    def omegas(self) -> tuple[float, float, float]:
        """Center angular frequencies (pump, input, output), exactly energy conserving."""
        w_i = self.input.omega
        w_p = self.pump.omega
        w_o = w_i + w_p if self.flavor is Flavor.SFG else w_i - w_p
        return w_p, w_i, w_o

    def center_betas(self) -> tuple[float, float, float]:
        w_p, w_i, w_o = self.omegas
        return (float(disp.beta(self.models[Role.PUMP], w_p)),
                float(disp.beta(self.models[Role.INPUT], w_i)),
                float(disp.beta(self.models[Role.OUTPUT], w_o)))

    def poling(self) -> float:
        """Signed poling period in meters (see ``PolingPeriod.signed``)."""
        if self.poling_period == "auto":
            return disp.poling_period(self.flavor, *self.center_betas()).signed
        return float(self.poling_period)

    def indices(self) -> tuple[float, float, float]:
        if self.effective_indices is not None:
            return tuple(float(n) for n in self.effective_indices)
        w_p, w_i, w_o = self.omegas
        return tuple(float(self.models[r].n(2 * math.pi * c / w))
                     for r, w in ((Role.PUMP, w_p), (Role.INPUT, w_i), (Role.OUTPUT, w_o)))

    def interaction_area(self) -> float:
        if self.profiles is not None:
            return effective_area(*self.profiles)
        if self.a_eff is None:
            raise ConfigError("process has neither an effective area nor transverse profiles")
        return self.a_eff

    def inverse_group_velocities(self) -> tuple[float, float, float]:
        w_p, w_i, w_o = self.omegas
        return tuple(1.0 / float(disp.group_velocity(self.models[r], w))
                     for r, w in ((Role.PUMP, w_p), (Role.INPUT, w_i), (Role.OUTPUT, w_o)))

    def linear_mismatch(self) -> tuple[float, float]:
        """Coefficients (a_i, a_o) of Delta beta ~ a_i dw_i + a_o dw_o near the center."""
        kp, ki, ko = self.inverse_group_velocities()
        if self.flavor is Flavor.SFG:
            return ki - kp, kp - ko
        return kp - ki, ko - kp

    def pump_amplitude(self, grid: FrequencyGrid | None = None) -> SpectralAmplitude:
        w_p = self.omegas[0]
        if grid is None:
            grid = FrequencyGrid.spanning(w_p, 1.5 * self.pump_shape.half_support(), 4096)
        return self.pump_shape.realize(grid, w_p)

    def with_(self, **changes) -> "ProcessSpec":
        return replace(self, **changes)


def default_grids(spec: ProcessSpec, count: int = 512, span: float = 6.0,
                  output_count: int | None = None) -> tuple[FrequencyGrid, FrequencyGrid]:
    """Input and output grids enclosing the JSA support.

    The support is the parallelogram where the pump-frequency offset stays
    within the pump's support and |Delta beta L / 2| stays within ``span``
    phasematching half widths (linearized dispersion).
    """
    w_p, w_i, w_o = spec.omegas
    a_i, a_o = spec.linear_mismatch()
    wp = spec.pump_shape.half_support() * span / 6.0
    wq = 2 * span * SINC_HWHM / spec.length
    det = a_i + a_o
    if abs(det) * wp < 1e-9 * wq:
        raise ConfigError("phasematching runs parallel to the pump ridge; grids must be given explicitly")
    # pump offset p = dw_o - dw_i (SFG) or dw_i - dw_o (DFG)
    sgn = 1.0 if spec.flavor is Flavor.SFG else -1.0
    ext_i = ext_o = 0.0
    for p in (-wp, wp):
        for q in (-wq, wq):
            di = (q - a_o * sgn * p) / det
            do = (q + a_i * sgn * p) / det
            ext_i, ext_o = max(ext_i, abs(di)), max(ext_o, abs(do))
    return (FrequencyGrid.spanning(w_i, ext_i, count),
            FrequencyGrid.spanning(w_o, ext_o, output_count or count))


def pump_grid_for(spec: ProcessSpec, grids, count: int = 2 ** 14) -> FrequencyGrid:
    """Pump grid covering every pump frequency implied by ``grids`` and the pump support."""
    gi, go = grids
    (i_lo, i_hi), (o_lo, o_hi) = gi.bounds, go.bounds
    if spec.flavor is Flavor.SFG:
        lo, hi = o_lo - i_hi, o_hi - i_lo
    else:
        lo, hi = i_lo - o_hi, i_hi - o_lo
    w_p = spec.omegas[0]
    half = max(w_p - lo, hi - w_p, spec.pump_shape.half_support())
    return FrequencyGrid.spanning(w_p, half * 1.001, count)


def _detuning(spec, grids):
    gi, go = grids
    wi = gi.omega[:, None]
    wo = go.omega[None, :]
    return wi, wo, (wo - wi if spec.flavor is Flavor.SFG else wi - wo)


def phasematching_matrix(spec: ProcessSpec, grids, form: str = "sinc") -> np.ndarray:
    """sinc(Delta beta L / 2) or its Gaussian approximation, shape (n_in, n_out)."""
    wi, wo, _ = _detuning(spec, grids)
    dbeta = disp.phase_mismatch(spec.flavor, wi, wo, spec.models, spec.poling())
    x = dbeta * spec.length / 2
    if form == "sinc":
        return np.sinc(x / np.pi)
    if form in ("gauss", "gaussian", "gaussian_approx"):
        return np.exp(-GAUSS_PM_COEFF * x ** 2)
    raise ConfigError(f"unknown phasematching form {form!r}")


def pump_matrix(spec: ProcessSpec, grids, alpha: SpectralAmplitude) -> np.ndarray:
    """alpha at the pump frequency implied by each (input, output) pair."""
    _, _, wp = _detuning(spec, grids)
    return alpha(wp)


@dataclass(frozen=True, eq=False)
class JointSpectralAmplitude:
    input_grid: FrequencyGrid
    output_grid: FrequencyGrid
    values: np.ndarray
    normalization: float
    flavor: Flavor = Flavor.SFG
    form: str = "sinc"
    pump: np.ndarray | None = None
    phasematching: np.ndarray | None = None

    def __post_init__(self):
        shape = (self.input_grid.count, self.output_grid.count)
        if self.values.shape != shape:
            raise GridError(f"JSA values {self.values.shape} do not match grids {shape}")

    @property
    def weight(self) -> float:
        return math.sqrt(self.input_grid.spacing * self.output_grid.spacing)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)) * self.weight ** 2

    def weighted(self) -> np.ndarray:
        """Values times sqrt(dw_i dw_o): singular values of this are the Schmidt coefficients."""
        return self.values * self.weight

    def summary(self, spec: ProcessSpec | None = None) -> dict:
        out = {
            "flavor": self.flavor.value,
            "form": self.form,
            "normalization_N": self.normalization,
            "input_grid": self.input_grid.to_dict(),
            "output_grid": self.output_grid.to_dict(),
        }
        if spec is not None:
            out["center_wavelengths_nm"] = {
                "pump": spec.pump.center_wavelength * 1e9,
                "input": spec.input.center_wavelength * 1e9,
                "output": spec.output.center_wavelength * 1e9,
            }
        return out


def build_jsa(spec: ProcessSpec, grids=None, form: str = "sinc",
              alpha: SpectralAmplitude | None = None, keep_factors: bool = True,
              count: int = 512) -> JointSpectralAmplitude:
    """Normalized JSA; ``N`` is stored so the physical coupling can be rebuilt."""
    if grids is None:
        grids = default_grids(spec, count)
    if alpha is None:
        alpha = spec.pump_amplitude(pump_grid_for(spec, grids))
    pm = phasematching_matrix(spec, grids, form)
    pump = pump_matrix(spec, grids, alpha)
    product = pump * pm
    gi, go = grids
    norm = math.sqrt(float(np.sum(np.abs(product) ** 2)) * gi.spacing * go.spacing)
    if norm == 0 or not math.isfinite(norm):
        raise EmptyJSAError("pump and phasematching functions do not overlap on the grids")
    return JointSpectralAmplitude(gi, go, product / norm, norm, spec.flavor, form,
                                  pump if keep_factors else None, pm if keep_factors else None)


def write_jsa(jsa: JointSpectralAmplitude, path) -> None:
    gi, go = jsa.input_grid, jsa.output_grid
    with Path(path).open("w") as fh:
        fh.write(JSA_HEADER + "\n")
        fh.write(f"input_grid {gi.center!r} {gi.spacing!r} {gi.count}\n")
        fh.write(f"output_grid {go.center!r} {go.spacing!r} {go.count}\n")
        fh.write(f"normalization {jsa.normalization!r}\n")
        fh.write(f"flavor {jsa.flavor.value} form {jsa.form}\n")
        flat = jsa.values.ravel()
        np.savetxt(fh, np.column_stack([flat.real, flat.imag]), fmt="%.17g")


def read_jsa(path) -> JointSpectralAmplitude:
    with Path(path).open() as fh:
        header = fh.readline().strip()
        if header != JSA_HEADER:
            raise GridError(f"{path}: expected header {JSA_HEADER!r}")
        gi = _grid_line(fh.readline())
        go = _grid_line(fh.readline())
        norm = float(fh.readline().split()[1])
        meta = fh.readline().split()
        data = np.loadtxt(fh, ndmin=2)
    values = (data[:, 0] + 1j * data[:, 1]).reshape(gi.count, go.count)
    return JointSpectralAmplitude(gi, go, values, norm, Flavor(meta[1]), meta[3])


def _grid_line(line):
    _, center, spacing, count = line.split()
    return FrequencyGrid(float(center), float(spacing), int(count))


def write_jsa_summary(jsa: JointSpectralAmplitude, path, spec: ProcessSpec | None = None) -> None:
    Path(path).write_text(json.dumps(jsa.summary(spec), indent=2, sort_keys=True) + "\n")
