"""Schmidt (singular value) decomposition of joint spectral amplitudes."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ContractError
from .spectra import FrequencyGrid, SpectralAmplitude, write_spectral_amplitude

DEFAULT_MAX_MODES = 16


@dataclass(frozen=True, eq=False)
class SchmidtData:
    """Schmidt coefficients and paired pulse modes.

    ``kappas`` holds every coefficient (descending) so that their squares sum
    to one; ``input_modes``/``output_modes`` hold the first ``max_modes``
    mode functions as rows, L2-normalized on their grids. The decomposed
    kernel is ``sum_j kappas[j] * input_modes[j][:, None] * output_modes[j][None, :]``.
    """

    kappas: np.ndarray
    input_modes: np.ndarray
    output_modes: np.ndarray
    input_grid: FrequencyGrid
    output_grid: FrequencyGrid

    @property
    def n_modes(self) -> int:
        return self.input_modes.shape[0]

    def input_mode(self, j: int) -> SpectralAmplitude:
        return SpectralAmplitude(self.input_grid, self.input_modes[j], f"phi_{j}")

    def output_mode(self, j: int) -> SpectralAmplitude:
        return SpectralAmplitude(self.output_grid, self.output_modes[j], f"psi_{j}")

    def reconstruct(self, n: int | None = None) -> np.ndarray:
        n = self.n_modes if n is None else n
        k = self.kappas[:n]
        return (self.input_modes[:n].T * k) @ self.output_modes[:n]

    def summary(self, n: int = 8) -> dict:
        return {
            "kappas": [float(k) for k in self.kappas[:n]],
            "kappa0_sq": float(self.kappas[0] ** 2),
            "schmidt_number": schmidt_number(self),
        }


def weighted_svd(matrix: np.ndarray, grid_in: FrequencyGrid, grid_out: FrequencyGrid,
                 max_modes: int | None = DEFAULT_MAX_MODES) -> SchmidtData:
    """Decompose an already quadrature-weighted kernel into L2-normalized modes.

    Phase convention: each input mode is rotated so its largest-magnitude
    sample is real and positive; the paired output mode absorbs the
    conjugate phase.
    """
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    n = len(s) if max_modes is None else min(max_modes, len(s))
    phi = u[:, :n].T / np.sqrt(grid_in.spacing)
    psi = vh[:n] / np.sqrt(grid_out.spacing)
    peak = phi[np.arange(n), np.argmax(np.abs(phi), axis=1)]
    phase = peak / np.abs(peak)
    phi = phi * np.conj(phase)[:, None]
    psi = psi * phase[:, None]
    return SchmidtData(s, phi, psi, grid_in, grid_out)


def schmidt_decompose(jsa, max_modes: int | None = DEFAULT_MAX_MODES, tol: float = 1e-6) -> SchmidtData:
    norm_sq = jsa.norm_sq()
    if abs(norm_sq - 1) > tol:
        raise ContractError(f"JSA is not normalized (norm^2 = {norm_sq:.6g})")
    return weighted_svd(jsa.weighted(), jsa.input_grid, jsa.output_grid, max_modes)


def schmidt_number(data) -> float:
    k2 = np.asarray(getattr(data, "kappas", data), dtype=float) ** 2
    return float(np.sum(k2) ** 2 / np.sum(k2 ** 2))


def export_schmidt(data: SchmidtData, directory, n_modes: int = 4, prefix: str = "schmidt") -> list[Path]:
    """JSON summary plus one spectral-amplitude file per exported mode."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    summary = directory / f"{prefix}.json"
    summary.write_text(json.dumps(data.summary(), indent=2, sort_keys=True) + "\n")
    written.append(summary)
    for j in range(min(n_modes, data.n_modes)):
        for kind, amp in (("phi", data.input_mode(j)), ("psi", data.output_mode(j))):
            p = directory / f"{prefix}_{kind}_{j}.txt"
            write_spectral_amplitude(amp, p)
            written.append(p)
    return written
