"""Transverse mode profiles and the effective interaction area."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GridError, TruncationError

PROFILE_HEADER = "# transverse-profile v1"


@dataclass(frozen=True, eq=False)
class TransverseProfile:
    """Real field profile f(x, y) sampled on uniform grids.

    ``values[i, j]`` is f(x[i], y[j]); profiles carry units of 1/m so that
    the integral of f^2 is 1.
    """

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        v = np.asarray(self.values)
        if v.shape != (x.size, y.size):
            raise GridError(f"profile shape {v.shape} does not match grids ({x.size}, {y.size})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "values", v)

    @property
    def cell(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.y[1] - self.y[0]))

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.cell)

    def normalized(self) -> "TransverseProfile":
        return TransverseProfile(self.x, self.y, self.values / math.sqrt(self.norm_sq()), self.label)

    def same_grid(self, other: "TransverseProfile") -> bool:
        return (self.x.shape == other.x.shape and self.y.shape == other.y.shape
                and np.allclose(self.x, other.x, rtol=0, atol=1e-12 * np.ptp(self.x))
                and np.allclose(self.y, other.y, rtol=0, atol=1e-12 * np.ptp(self.y)))


def gaussian_profile(x, y, w_x: float, w_y: float, x0: float = 0.0, y0: float = 0.0,
                     label: str = "gaussian") -> TransverseProfile:
    """Normalized exp(-(x-x0)^2/w_x^2 - (y-y0)^2/w_y^2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x0 - 4 * w_x < x[0] or x0 + 4 * w_x > x[-1] or y0 - 4 * w_y < y[0] or y0 + 4 * w_y > y[-1]:
        raise TruncationError(
            f"Gaussian profile needs x in [{(x0 - 4 * w_x) * 1e6:.3g}, {(x0 + 4 * w_x) * 1e6:.3g}] um, "
            f"y in [{(y0 - 4 * w_y) * 1e6:.3g}, {(y0 + 4 * w_y) * 1e6:.3g}] um")
    values = np.exp(-((x[:, None] - x0) / w_x) ** 2 - ((y[None, :] - y0) / w_y) ** 2)
    return TransverseProfile(x, y, values, label).normalized()


def overlap_integral(f_p: TransverseProfile, f_i: TransverseProfile, f_o: TransverseProfile) -> complex:
    if not (f_p.same_grid(f_i) and f_p.same_grid(f_o)):
        raise GridError("effective area needs all three profiles on one grid")
    return complex(np.sum(f_p.values * f_i.values * np.conj(f_o.values)) * f_p.cell)


def effective_area(f_p: TransverseProfile, f_i: TransverseProfile, f_o: TransverseProfile) -> float:
    """A_eff in m^2; ``math.inf`` when the three-mode overlap vanishes."""
    ov = overlap_integral(f_p, f_i, f_o)
    scale = math.sqrt(f_p.norm_sq() * f_i.norm_sq() * f_o.norm_sq())
    # |overlap| below ~1e-12 of its Cauchy-Schwarz scale is a parity zero
    bound = float(np.max(np.abs(f_p.values))) * scale * 1e-12
    if abs(ov) <= bound:
        return math.inf
    return 1.0 / abs(ov) ** 2


def read_profile(path, normalize: bool = True) -> TransverseProfile:
    """Text matrix: first row x samples (um), first column y samples (um)."""
    path = Path(path)
    with path.open() as fh:
        first = fh.readline().strip()
    if first != PROFILE_HEADER:
        raise GridError(f"{path}: expected header {PROFILE_HEADER!r}")
    data = np.loadtxt(path, comments="#", ndmin=2)
    x = data[0, 1:] * 1e-6
    y = data[1:, 0] * 1e-6
    prof = TransverseProfile(x, y, data[1:, 1:].T, path.stem)
    return prof.normalized() if normalize else prof


def write_profile(profile: TransverseProfile, path) -> None:
    out = np.zeros((profile.y.size + 1, profile.x.size + 1))
    out[0, 1:] = profile.x * 1e6
    out[1:, 0] = profile.y * 1e6
    out[1:, 1:] = np.real(profile.values).T
    np.savetxt(path, out, header=PROFILE_HEADER[2:], fmt="%.12g")
