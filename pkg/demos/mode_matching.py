"""How well does a gate pick one pulse mode out of a Hermite-Gauss family?

The first part uses the engineered gate's accepted mode; the second
stretches the test pulses to twice its width and shows the selectivity drop.
"""

import math

import numpy as np

from pulsegate import build_jsa, default_grids, schmidt_decompose
from pulsegate.acceptance import engineered_spec
from pulsegate.modematch import (device_acceptance, duration_sweep, gaussian_overlap_sq,
                                 hermite_gauss_state, rms_width, selection_probabilities, selectivity)
from pulsegate.spectra import FrequencyGrid

spec = engineered_spec()
gi, go = default_grids(spec, 256)
# widen the input axis so the broadest test mode still fits
gi = FrequencyGrid.spanning(gi.center, 4 * gi.half_span(), 640)
device = schmidt_decompose(build_jsa(spec, (gi, go)))
theta = math.pi / 2 / device.kappas[0]

phi0 = device_acceptance(device)
w = np.abs(phi0.values) ** 2
omega0 = float(np.sum(phi0.omega * w) / w.sum())
sigma0 = rms_width(phi0)

for ratio in (1.0, 2.0):
    state = hermite_gauss_state(device.input_grid, omega0, ratio * sigma0, orders=(0, 1, 2, 3))
    p = selection_probabilities(state, device, theta)
    print(f"width ratio {ratio}: p = {np.round(p, 4)}, selectivity = {selectivity(state, device, theta, 0):.4f}")

print(f"Gaussian overlap formula at ratio 2: {gaussian_overlap_sq(2, 1):.3f}")
print("\nratio   p0      p1      p2      p3      selectivity")
for row in duration_sweep(device, theta, [0.5, 0.75, 1.0, 1.5, 2.0, 3.0]):
    print("  ".join(f"{x:6.4f}" for x in row))
