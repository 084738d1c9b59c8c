"""
Material dispersion for the three interacting waves.

Refractive indices come from temperature-dependent Sellmeier fits for
congruent lithium niobate (extraordinary axis after Jundt 1997, ordinary
axis after Edwards & Lawrence 1984), from a tabulated n(lambda) with cubic
interpolation, or from a dispersionless fixed index used in tests.

All public functions take SI units: wavelengths in meters, angular
frequencies in rad/s, propagation constants in rad/m. Sellmeier formulas are
evaluated internally with the wavelength in microns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, NamedTuple

import numpy as np
import yaml
from scipy.constants import c
from scipy.interpolate import CubicSpline

from .errors import ConfigError, DomainError, GVMError

DEFAULT_TEMPERATURE = 463.15  # kelvin, 190 degC
DEFAULT_WINDOW = (0.4e-6, 2.0e-6)
_CELSIUS = 273.15

# relative step of the central difference used for d(beta)/d(omega)
GV_REL_STEP = 1e-4


class Axis(str, Enum):
    ORDINARY = "ordinary"
    EXTRAORDINARY = "extraordinary"


class Role(str, Enum):
    PUMP = "pump"
    INPUT = "input"
    OUTPUT = "output"


class Flavor(str, Enum):
    SFG = "SFG"
    DFG = "DFG"


def _as_enum(kind, value):
    if isinstance(value, kind):
        return value
    try:
        return kind(value)
    except ValueError:
        # accept enum member names too ("sfg", "ORDINARY")
        text = str(value).strip()
        try:
            return kind[text.upper()]
        except KeyError:
            pass
        # unique prefix, so "o"/"e" work for axes
        hits = [m for m in kind if m.value.lower().startswith(text.lower())] if text else []
        if len(hits) == 1:
            return hits[0]
        raise ConfigError(f"unknown {kind.__name__} {value!r}") from None


# --------------------------------------------------------------------------
# Models
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DispersionModel:
    """Base class: an index model for one polarization axis.

    Subclasses implement ``_n_um`` (index vs wavelength in microns) and
    optionally ``_dn_dlam_um`` (its analytic derivative, per micron).
    """

    axis: Axis
    temperature: float = DEFAULT_TEMPERATURE
    source: str = ""
    window: tuple[float, float] = DEFAULT_WINDOW

    def __post_init__(self):
        object.__setattr__(self, "axis", _as_enum(Axis, self.axis))
        lo, hi = self.window
        if not 0 < lo < hi:
            raise ConfigError(f"invalid validity window {self.window}")

    def in_window(self, wavelength) -> bool:
        lam = np.asarray(wavelength, dtype=float)
        lo, hi = self.window
        return bool(np.all((lam >= lo) & (lam <= hi)))

    def _check(self, wavelength):
        if not self.in_window(wavelength):
            lo, hi = self.window
            lam = np.asarray(wavelength, dtype=float)
            raise DomainError(
                f"wavelength {lam.min() * 1e9:.2f}-{lam.max() * 1e9:.2f} nm outside "
                f"validity window [{lo * 1e9:.0f}, {hi * 1e9:.0f}] nm of {self.source or type(self).__name__}"
            )

    def n(self, wavelength):
        self._check(wavelength)
        return self._n_um(np.asarray(wavelength, dtype=float) * 1e6)

    def dn_dlambda(self, wavelength):
        """Analytic dn/d(lambda) in 1/m."""
        self._check(wavelength)
        return self._dn_dlam_um(np.asarray(wavelength, dtype=float) * 1e6) * 1e6

    def _n_um(self, lam_um):
        raise NotImplementedError

    def _dn_dlam_um(self, lam_um):
        raise NotImplementedError(f"{type(self).__name__} has no analytic derivative")


@dataclass(frozen=True)
class FixedIndexModel(DispersionModel):
    """Dispersionless medium, n independent of wavelength."""

    index: float = 1.0

    def _n_um(self, lam_um):
        return np.full_like(lam_um, self.index, dtype=float)[()]

    def _dn_dlam_um(self, lam_um):
        return np.zeros_like(lam_um, dtype=float)[()]


# Published coefficient sets. Keys follow the symbols of the original publications.
JUNDT_1997_E = {
    "a1": 5.35583, "a2": 0.100473, "a3": 0.20692, "a4": 100.0,
    "a5": 11.34927, "a6": 1.5334e-2,
    "b1": 4.629e-7, "b2": 3.862e-8, "b3": -0.89e-8, "b4": 2.657e-5,
    "t0_c": 24.5, "t_offset_c": 570.82,
}

EDWARDS_LAWRENCE_1984_O = {
    "A1": 4.9048, "A2": 0.11775, "A3": 0.21802, "A4": 0.027153,
    "B1": 2.2314e-8, "B2": -2.9671e-8, "B3": 2.1429e-8,
    "t0_c": 24.5, "t_offset_c": 570.5,
}


@dataclass(frozen=True)
class SellmeierModel(DispersionModel):
    """Temperature-dependent Sellmeier expansion.

    Both supported forms reduce to
    ``n^2 = A + sum_k B_k / (lam^2 - C_k^2) - D lam^2`` with coefficients
    depending on ``f = (T - t0)(T + t_offset)`` (T in degC).

    form
        ``"jundt1997"`` or ``"edwards1984"``.
    """

    form: str = "jundt1997"
    coefficients: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        super().__post_init__()
        if self.form not in ("jundt1997", "edwards1984"):
            raise ConfigError(f"unknown Sellmeier form {self.form!r}")
        defaults = JUNDT_1997_E if self.form == "jundt1997" else EDWARDS_LAWRENCE_1984_O
        missing = set(defaults) - set(self.coefficients)
        if missing:
            raise ConfigError(f"Sellmeier coefficients missing: {sorted(missing)}")
        object.__setattr__(self, "coefficients", dict(self.coefficients))

    def _terms(self):
        k = self.coefficients
        t = self.temperature - _CELSIUS
        f = (t - k["t0_c"]) * (t + k["t_offset_c"])
        if self.form == "jundt1997":
            a = k["a1"] + k["b1"] * f
            poles = [
                (k["a2"] + k["b2"] * f, k["a3"] + k["b3"] * f),
                (k["a4"] + k["b4"] * f, k["a5"]),
            ]
            d = k["a6"]
        else:
            a = k["A1"] + k["B3"] * f
            poles = [(k["A2"] + k["B1"] * f, k["A3"] + k["B2"] * f)]
            d = k["A4"]
        return a, poles, d

    def _n_um(self, lam_um):
        a, poles, d = self._terms()
        l2 = lam_um ** 2
        s = a - d * l2
        for b, c0 in poles:
            s = s + b / (l2 - c0 ** 2)
        return np.sqrt(s)

    def _dn_dlam_um(self, lam_um):
        a, poles, d = self._terms()
        l2 = lam_um ** 2
        ds = -2 * d * lam_um
        for b, c0 in poles:
            ds = ds - 2 * lam_um * b / (l2 - c0 ** 2) ** 2
        return ds / (2 * self._n_um(lam_um))


@dataclass(frozen=True)
class TabulatedModel(DispersionModel):
    """Index from a table of (wavelength, n), cubic-spline interpolated.

    The validity window is the table range.
    """

    wavelengths: tuple = ()
    indices: tuple = ()

    def __post_init__(self):
        lam = np.asarray(self.wavelengths, dtype=float)
        if lam.size < 4 or np.any(np.diff(lam) <= 0):
            raise ConfigError("tabulated index needs >= 4 strictly increasing wavelengths")
        object.__setattr__(self, "window", (float(lam[0]), float(lam[-1])))
        super().__post_init__()
        spline = CubicSpline(lam * 1e6, np.asarray(self.indices, dtype=float))
        object.__setattr__(self, "_spline", spline)

    def _n_um(self, lam_um):
        return self._spline(lam_um)[()]

    def _dn_dlam_um(self, lam_um):
        return self._spline(lam_um, 1)[()]


def congruent_ln(axis, temperature: float = DEFAULT_TEMPERATURE) -> SellmeierModel:
    """Bulk congruent LiNbO3 for the given axis at ``temperature`` (K)."""
    axis = _as_enum(Axis, axis)
    if axis is Axis.EXTRAORDINARY:
        return SellmeierModel(axis, temperature, "congruent LiNbO3, Jundt 1997",
                              form="jundt1997", coefficients=JUNDT_1997_E)
    return SellmeierModel(axis, temperature, "congruent LiNbO3, Edwards & Lawrence 1984",
                          form="edwards1984", coefficients=EDWARDS_LAWRENCE_1984_O)


def load_material(path, temperature: float | None = None) -> DispersionModel:
    """Read a material file.

    Two formats are accepted: a YAML mapping with keys ``axis``, ``form``,
    ``coefficients``, ``t_ref_kelvin``, ``valid_window_um`` and ``source``;
    or a two-column ``(lambda_um, n)`` table whose first line is
    ``# tabulated-index v1``.
    """
    path = Path(path)
    text = path.read_text()
    first = text.splitlines()[0].strip() if text else ""
    if first.startswith("# tabulated-index"):
        if first != "# tabulated-index v1":
            raise ConfigError(f"{path}: unsupported header {first!r}")
        rows = np.loadtxt(path, comments="#", ndmin=2)
        axis = Axis.ORDINARY
        source = path.stem
        for line in text.splitlines()[1:]:
            if line.startswith("# axis:"):
                axis = _as_enum(Axis, line.split(":", 1)[1].strip())
            elif line.startswith("# source:"):
                source = line.split(":", 1)[1].strip()
        return TabulatedModel(axis, temperature or DEFAULT_TEMPERATURE, source,
                              wavelengths=tuple(rows[:, 0] * 1e-6), indices=tuple(rows[:, 1]))

    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a key-value material file")
    try:
        coeffs = dict(data["coefficients"])
        form = data.get("form", "jundt1997")
        window = tuple(w * 1e-6 for w in data.get("valid_window_um", (0.4, 2.0)))
        t_ref = float(data.get("t_ref_kelvin", _CELSIUS + 24.5))
        coeffs.setdefault("t0_c", t_ref - _CELSIUS)
        coeffs.setdefault("t_offset_c", 570.82 if form == "jundt1997" else 570.5)
        return SellmeierModel(data["axis"], temperature or DEFAULT_TEMPERATURE,
                              data.get("source", path.stem), window, form=form,
                              coefficients=coeffs)
    except KeyError as exc:
        raise ConfigError(f"{path}: missing key {exc}") from None


def save_material(model: SellmeierModel, path) -> None:
    k = dict(model.coefficients)
    doc = {
        "axis": model.axis.value,
        "form": model.form,
        "coefficients": {key: float(v) for key, v in k.items() if key not in ("t0_c",)},
        "t_ref_kelvin": k["t0_c"] + _CELSIUS,
        "valid_window_um": [model.window[0] * 1e6, model.window[1] * 1e6],
        "source": model.source,
    }
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))


# --------------------------------------------------------------------------
# Wave description
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveSpec:
    center_wavelength: float
    polarization_axis: Axis
    role: Role

    def __post_init__(self):
        object.__setattr__(self, "polarization_axis", _as_enum(Axis, self.polarization_axis))
        object.__setattr__(self, "role", _as_enum(Role, self.role))
        lo, hi = DEFAULT_WINDOW
        if not lo <= self.center_wavelength <= hi:
            raise DomainError(f"{self.role.value} wavelength {self.center_wavelength * 1e9:.1f} nm "
                              f"outside [{lo * 1e9:.0f}, {hi * 1e9:.0f}] nm")

    @property
    def omega(self) -> float:
        return 2 * math.pi * c / self.center_wavelength


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def refractive_index(model: DispersionModel, wavelength):
    return model.n(wavelength)


def beta(model: DispersionModel, omega):
    """Propagation constant n(2 pi c / omega) * omega / c."""
    omega = np.asarray(omega, dtype=float)
    return model.n(2 * np.pi * c / omega) * omega / c


def _dbeta_domega(model, omega, h):
    return (beta(model, omega + h) - beta(model, omega - h)) / (2 * h)


def group_velocity(model: DispersionModel, omega, rel_step: float = GV_REL_STEP):
    """Group velocity (d beta / d omega)^-1 by Richardson-extrapolated central differences."""
    omega = np.asarray(omega, dtype=float)
    h = rel_step * omega
    lam_lo = 2 * np.pi * c / (omega + h)
    lam_hi = 2 * np.pi * c / (omega - h)
    if not (model.in_window(lam_lo) and model.in_window(lam_hi)):
        raise DomainError("group-velocity stencil leaves the validity window "
                          f"[{model.window[0] * 1e9:.0f}, {model.window[1] * 1e9:.0f}] nm")
    d1 = _dbeta_domega(model, omega, h)
    d2 = _dbeta_domega(model, omega, h / 2)
    return 1.0 / ((4 * d2 - d1) / 3)


def group_velocity_analytic(model: DispersionModel, omega):
    """c / (n - lambda dn/dlambda) from the analytic index derivative."""
    lam = 2 * np.pi * c / np.asarray(omega, dtype=float)
    return c / (model.n(lam) - lam * model.dn_dlambda(lam))


def group_index(model: DispersionModel, wavelength):
    return c / group_velocity(model, 2 * np.pi * c / np.asarray(wavelength, dtype=float))


def find_gvm_pump(input_wave: WaveSpec, pump_axis, models: Mapping,
                  search_window: tuple[float, float], resolution: float = 1e-11) -> float:
    """Pump wavelength whose group velocity equals that of ``input_wave``.

    ``models`` maps each polarization axis to its DispersionModel. The gap
    v_g(pump) - v_g(input) is bracketed by bisection down to ``resolution``
    (0.01 nm) and the last bracket is closed by linear interpolation.
    """
    pump_axis = _as_enum(Axis, pump_axis)
    m_in = _model_for(models, input_wave.polarization_axis)
    m_p = _model_for(models, pump_axis)
    v_in = float(group_velocity(m_in, input_wave.omega))

    def gap(lam):
        return float(group_velocity(m_p, 2 * np.pi * c / lam)) - v_in

    lo, hi = sorted(search_window)
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0:
        return lo
    if g_hi == 0:
        return hi
    if np.sign(g_lo) == np.sign(g_hi):
        raise GVMError(
            f"no GVM solution in window [{lo * 1e9:.1f}, {hi * 1e9:.1f}] nm "
            f"(velocity gaps {g_lo:.4g} and {g_hi:.4g} m/s)", (g_lo, g_hi))
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if g_mid == 0:
            return mid
        if np.sign(g_mid) == np.sign(g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    return lo - g_lo * (hi - lo) / (g_hi - g_lo)


def _model_for(models: Mapping, key):
    if key in models:
        return models[key]
    value = getattr(key, "value", key)
    if value in models:
        return models[value]
    for k, m in models.items():
        if isinstance(k, str) and not isinstance(k, Enum) and isinstance(key, Enum):
            try:
                if _as_enum(type(key), k) is key:
                    return m
            except (ConfigError, TypeError):
                pass
    raise ConfigError(f"no dispersion model for {value!r}")


def output_wavelength(flavor, lambda_in: float, lambda_pump: float) -> float:
    flavor = _as_enum(Flavor, flavor)
    if lambda_in <= 0 or lambda_pump <= 0:
        raise DomainError("wavelengths must be positive")
    inv = 1 / lambda_in + 1 / lambda_pump if flavor is Flavor.SFG else 1 / lambda_in - 1 / lambda_pump
    if inv <= 0:
        raise DomainError(f"{flavor.value} output frequency is not positive "
                          f"(input {lambda_in * 1e9:.1f} nm, pump {lambda_pump * 1e9:.1f} nm)")
    return 1 / inv


class PolingPeriod(NamedTuple):
    """Quasi-phasematching period.

    ``period`` is positive (``inf`` when the process is already
    phasematched); ``sign`` is the sign of the uncompensated mismatch, so the
    grating vector needed is ``sign * 2 pi / period``.
    """

    period: float
    sign: int

    @property
    def needed(self) -> bool:
        return self.sign != 0

    @property
    def signed(self) -> float:
        """Period with the grating direction folded into its sign."""
        return self.sign * self.period if self.needed else math.inf


def _mismatch_terms(flavor, beta_p, beta_i, beta_o):
    if flavor is Flavor.SFG:
        return beta_p + beta_i - beta_o
    return beta_p - beta_i + beta_o


def poling_period(flavor, beta_p: float, beta_i: float, beta_o: float) -> PolingPeriod:
    flavor = _as_enum(Flavor, flavor)
    if not all(map(math.isfinite, (beta_p, beta_i, beta_o))):
        raise DomainError("propagation constants must be finite")
    k = _mismatch_terms(flavor, beta_p, beta_i, beta_o)
    if k == 0:
        return PolingPeriod(math.inf, 0)
    return PolingPeriod(2 * math.pi / abs(k), int(np.sign(k)))


def phase_mismatch(flavor, omega_i, omega_o, models: Mapping, poling: float = math.inf):
    """Delta beta over (omega_i, omega_o), vectorized.

    ``models`` maps roles ``pump``/``input``/``output`` to DispersionModels.
    ``poling`` is the signed period in meters (``PolingPeriod.signed``); its
    grating vector 2 pi / poling is subtracted.
    """
    flavor = _as_enum(Flavor, flavor)
    omega_i = np.asarray(omega_i, dtype=float)
    omega_o = np.asarray(omega_o, dtype=float)
    omega_p = omega_o - omega_i if flavor is Flavor.SFG else omega_i - omega_o
    if np.any(omega_p <= 0):
        raise DomainError(f"implied pump frequency not positive for {flavor.value}")
    b_p = beta(_model_for(models, Role.PUMP), omega_p)
    b_i = beta(_model_for(models, Role.INPUT), omega_i)
    b_o = beta(_model_for(models, Role.OUTPUT), omega_o)
    grating = 0.0 if math.isinf(poling) else 2 * math.pi / poling
    return _mismatch_terms(flavor, b_p, b_i, b_o) - grating
