"""Mode matching between multimode input states and a pulse-gate device."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError, GridError
from .spectra import FrequencyGrid, SpectralAmplitude, hermite_gauss_spectrum

SWEEP_HEADER = "# modematch-sweep v1"


class MultimodeDeviceWarning(UserWarning):
    """The device's leading Schmidt weight is below the single-mode threshold."""


@dataclass(frozen=True, eq=False)
class InputState:
    """Diagonal ensemble of orthonormal pulse modes."""

    modes: tuple
    weights: np.ndarray

    def __post_init__(self):
        modes = tuple(self.modes)
        w = np.asarray(self.weights, dtype=float)
        if len(modes) != w.size:
            raise ContractError("one weight per mode is required")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-10:
            raise ContractError("weights must be non-negative and sum to 1")
        grid = modes[0].grid
        if any(m.grid != grid for m in modes):
            raise GridError("all modes of an input state must share one grid")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "weights", w)

    @property
    def grid(self) -> FrequencyGrid:
        return self.modes[0].grid

    def gram(self) -> np.ndarray:
        v = np.array([m.values for m in self.modes])
        return v.conj() @ v.T * self.grid.spacing


def hermite_gauss_state(grid: FrequencyGrid, omega0: float, sigma: float, orders=(0, 1, 2, 3),
                        weights=None) -> InputState:
    modes = [hermite_gauss_spectrum(grid, n, omega0, sigma, label=f"HG{n}") for n in orders]
    if weights is None:
        weights = np.full(len(modes), 1.0 / len(modes))
    return InputState(tuple(modes), weights)


def device_acceptance(data, threshold: float = 0.8) -> SpectralAmplitude:
    """The device's accepted input mode phi_0."""
    k0_sq = float(data.kappas[0] ** 2)
    if k0_sq < threshold:
        warnings.warn(f"device is multimode: kappa_0^2 = {k0_sq:.3f} < {threshold}",
                      MultimodeDeviceWarning, stacklevel=2)
    return data.input_mode(0)


def overlap_matrix(state: InputState, device) -> np.ndarray:
    """o[m, j] = <phi_j | chi_m>."""
    if state.grid != device.input_grid:
        raise GridError("input state and device are sampled on different grids")
    chi = np.array([m.values for m in state.modes])
    return (chi @ device.input_modes.conj().T) * state.grid.spacing


def selection_probabilities(state: InputState, device, theta: float) -> np.ndarray:
    """Conversion probability of each input mode, summed over device modes."""
    o2 = np.abs(overlap_matrix(state, device)) ** 2
    eta = np.sin(device.kappas[:device.n_modes] * theta) ** 2
    return np.clip(o2 @ eta, 0.0, 1.0)


def selectivity(state: InputState, device, theta: float, target_index: int) -> float:
    """p_target * (1 - max over the other modes of p_m)."""
    p = selection_probabilities(state, device, theta)
    if not 0 <= target_index < p.size:
        raise IndexError(f"target mode {target_index} outside 0..{p.size - 1}")
    others = np.delete(p, target_index)
    return float(p[target_index] * (1 - (others.max() if others.size else 0.0)))


def rms_width(amp: SpectralAmplitude) -> float:
    """sqrt(2) times the intensity standard deviation; equals sigma for a Gaussian amplitude."""
    w = amp.omega
    p = np.abs(amp.values) ** 2
    p = p / p.sum()
    mean = float(np.sum(w * p))
    return math.sqrt(2 * float(np.sum((w - mean) ** 2 * p)))


def gaussian_overlap_sq(sigma_1: float, sigma_2: float) -> float:
    """|<g1|g2>|^2 of two co-centered normalized Gaussian amplitudes."""
    return 2 * sigma_1 * sigma_2 / (sigma_1 ** 2 + sigma_2 ** 2)


def duration_sweep(device, theta: float, ratios, orders=(0, 1, 2, 3), target_index: int = 0):
    """Conversion probabilities of HG input modes whose width is ``ratio`` times phi_0's.

    Returns rows (ratio, p_0, ..., selectivity).
    """
    phi0 = device.input_mode(0)
    omega0 = float(np.sum(phi0.omega * np.abs(phi0.values) ** 2) / np.sum(np.abs(phi0.values) ** 2))
    sigma0 = rms_width(phi0)
    rows = []
    for r in ratios:
        state = hermite_gauss_state(device.input_grid, omega0, sigma0 * r, orders)
        p = selection_probabilities(state, device, theta)
        rows.append([float(r), *p.tolist(), selectivity(state, device, theta, target_index)])
    return np.array(rows)


def modematch_report(state: InputState, device, theta: float) -> list[dict]:
    o2 = np.abs(overlap_matrix(state, device)[:, 0]) ** 2
    p = selection_probabilities(state, device, theta)
    return [{"mode_index": m, "overlap_sq": float(o2[m]), "conversion_probability": float(p[m])}
            for m in range(len(state.modes))]


def write_modematch_report(report: list[dict], path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


def write_duration_sweep(rows: np.ndarray, path) -> None:
    n = rows.shape[1] - 2
    with Path(path).open("w", newline="") as fh:
        fh.write(SWEEP_HEADER + "\n")
        w = csv.writer(fh)
        w.writerow(["duration_ratio"] + [f"p_{m}" for m in range(n)] + ["selectivity"])
        for r in rows:
            w.writerow([repr(float(x)) for x in r])

