"""Beamsplitter and squeezer transforms, coupling strength, efficiencies and power budgets."""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.constants import c, epsilon_0

from .dispersion import _as_enum
from .errors import ConfigError, ContractError

SWEEP_HEADER = "# efficiency-sweep v1"


class TransformKind(str, enum.Enum):
    BEAMSPLITTER = "beamsplitter"
    SQUEEZER = "squeezer"


@dataclass(frozen=True, eq=False)
class FlavorTransform:
    """2x2 mode transform.

    Beamsplitter acts on (a, c): a -> cos(t) a - i sin(t) c and symmetrically
    for c. Squeezer acts on (b, c^dagger): b -> cosh(z) b - sinh(z) c^dagger.
    """

    kind: TransformKind
    parameter: float
    matrix: np.ndarray

    def invariant(self) -> float:
        """cos^2 + sin^2 or cosh^2 - sinh^2; equals 1 for a valid transform."""
        m = self.matrix
        if self.kind is TransformKind.BEAMSPLITTER:
            return float(abs(m[0, 0]) ** 2 + abs(m[0, 1]) ** 2)
        return float(abs(m[0, 0]) ** 2 - abs(m[0, 1]) ** 2)

    def residual(self) -> float:
        """Unitarity (beamsplitter) or symplecticity (squeezer) error, Frobenius."""
        m = self.matrix
        if self.kind is TransformKind.BEAMSPLITTER:
            return float(np.linalg.norm(m.conj().T @ m - np.eye(2)))
        eta = np.diag([1.0, -1.0])
        return float(np.linalg.norm(m.conj().T @ eta @ m - eta))


def classify_flavor(pumped_field) -> TransformKind:
    """Pumping field 'a' gives the squeezer (PDC); pumping 'b' gives the beamsplitter (SFG/DFG)."""
    role = str(getattr(pumped_field, "value", pumped_field)).lower()
    if role == "a":
        return TransformKind.SQUEEZER
    if role == "b":
        return TransformKind.BEAMSPLITTER
    raise ConfigError(f"pumped field must be 'a' or 'b', got {pumped_field!r}")


def flavor_transform(kind, parameter: float) -> FlavorTransform:
    kind = _as_enum(TransformKind, kind)
    if not math.isfinite(parameter):
        raise ValueError("transform parameter must be finite")
    if kind is TransformKind.BEAMSPLITTER:
        cs, sn = math.cos(parameter), math.sin(parameter)
        m = np.array([[cs, -1j * sn], [-1j * sn, cs]])
    else:
        ch, sh = math.cosh(parameter), math.sinh(parameter)
        m = np.array([[ch, -sh], [-sh, ch]], dtype=complex)
    return FlavorTransform(kind, float(parameter), m)


def _coupling_prefactor(spec, N: float) -> float:
    """theta per sqrt(P_p), calibration included.

    Units: the JSA is normalized in (rad/s)^-1 and the pump amplitude in
    s^(1/2), so N carries s^(-1/2) and |integral of alpha|^2 carries s^-1. With
    d_eff in m/V, L in m, A_eff in m^2 and P in W the product is dimensionless.
    ``calibration`` is a pure number (1 means no correction).
    """
    if not N > 0:
        raise ContractError("JSA normalization N must be positive")
    a_eff = spec.interaction_area()
    if not math.isfinite(a_eff):
        return 0.0
    _, w_i, w_o = spec.omegas
    w_i, w_o = abs(w_i), abs(w_o)
    n_p, n_i, n_o = spec.indices()
    alpha = spec.pump_amplitude()
    alpha_int_sq = abs(alpha.integral()) ** 2
    front = 2 * spec.d_eff * math.pi ** 2 * spec.length * N / c
    root = math.sqrt(2 * w_i * w_o / (c * epsilon_0 * n_p * n_i * n_o * alpha_int_sq))
    return spec.calibration * front * root / math.sqrt(a_eff)


def coupling_theta(spec, N: float, peak_power: float | None = None) -> float:
    """Beamsplitter angle theta (rad) at the given pump peak power (default: ``spec.pump_peak_power``)."""
    p = spec.pump_peak_power if peak_power is None else peak_power
    if p < 0:
        raise ConfigError("pump peak power must be non-negative")
    return _coupling_prefactor(spec, N) * math.sqrt(p)


def required_pump_power(spec, N: float) -> float:
    """Peak power (W) at which theta = pi/2."""
    k = _coupling_prefactor(spec, N)
    if k == 0:
        return math.inf
    return (math.pi / 2 / k) ** 2


def efficiencies(kappas, theta: float) -> np.ndarray:
    return np.sin(np.asarray(kappas, dtype=float) * theta) ** 2


def average_power(peak_power: float, fwhm_duration: float, rep_rate: float,
                  shape_factor: float = 1.0) -> float:
    """Duty-cycle average power; shape_factor 1 is the plain FWHM product."""
    if peak_power < 0 or fwhm_duration < 0 or rep_rate < 0:
        raise ValueError("average_power arguments must be non-negative")
    return peak_power * fwhm_duration * rep_rate * shape_factor


def convert_state(coefficients, data, theta: float):
    """Per-mode beamsplitter action on coefficients over the device's input modes.

    ``data`` may be SchmidtData or a plain kappa array. Returns
    (converted, transmitted) coefficient vectors.
    """
    kappas = np.asarray(getattr(data, "kappas", data), dtype=float)
    coeffs = np.asarray(coefficients, dtype=complex)
    if coeffs.ndim != 1 or coeffs.size > kappas.size:
        raise ContractError(
            f"state has {coeffs.size} coefficients but the device has {kappas.size} modes")
    k = kappas[:coeffs.size] * theta
    return -1j * np.sin(k) * coeffs, np.cos(k) * coeffs


@dataclass
class DeviceReport:
    theta: float
    kappas: np.ndarray
    efficiencies: np.ndarray
    required_peak_power: float
    average_power: float
    selected_mode_index: int
    d_eff: float = float("nan")
    calibration: float = 1.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kappas"] = [float(k) for k in self.kappas]
        d["efficiencies"] = [float(e) for e in self.efficiencies]
        return d

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


def device_report(spec, jsa, schmidt, peak_power: float | None = None) -> DeviceReport:
    theta = coupling_theta(spec, jsa.normalization, peak_power)
    eta = efficiencies(schmidt.kappas, theta)
    p_req = required_pump_power(spec, jsa.normalization)
    p_avg = average_power(p_req, spec.pump_shape.fwhm_duration, spec.rep_rate)
    return DeviceReport(theta, np.asarray(schmidt.kappas), eta, p_req, p_avg,
                        int(np.argmax(eta)), spec.d_eff, spec.calibration)


def efficiency_sweep(kappas, thetas, n_modes: int = 4) -> np.ndarray:
    """Rows of (theta, eta_0, ..., eta_{n-1})."""
    k = np.asarray(kappas, dtype=float)[:n_modes]
    t = np.asarray(thetas, dtype=float)
    return np.column_stack([t, np.sin(np.outer(t, k)) ** 2])


def write_efficiency_sweep(rows: np.ndarray, path) -> None:
    n = rows.shape[1] - 1
    with Path(path).open("w", newline="") as fh:
        fh.write(SWEEP_HEADER + "\n")
        w = csv.writer(fh)
        w.writerow(["theta"] + [f"eta_{j}" for j in range(n)])
        for r in rows:
            w.writerow([repr(float(x)) for x in r])
