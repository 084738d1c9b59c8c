"""Design a single-mode pulse gate from scratch.

Run with ``python3 demos/design_walkthrough.py``. Takes a few seconds.
"""


import numpy as np

from pulsegate import (ProcessSpec, PumpShape, WaveSpec, build_jsa, congruent_ln, coupling_theta,
                       find_gvm_pump, required_pump_power, schmidt_decompose, schmidt_number)
from pulsegate.conversion import average_power, efficiencies
from pulsegate.dispersion import Axis, group_index

models = {axis: congruent_ln(axis) for axis in Axis}

# Step 1: pick the pump so it travels with the 1550 nm signal.
signal = WaveSpec(1550e-9, "o", "input")
lam_p = find_gvm_pump(signal, "e", models, (0.6e-6, 1.2e-6))
print(f"group-velocity-matched pump: {lam_p * 1e9:.2f} nm")
print(f"  group index, signal (o) {group_index(models[Axis.ORDINARY], 1550e-9):.5f}"
      f"  pump (e) {group_index(models[Axis.EXTRAORDINARY], lam_p):.5f}")

# Step 2: the process and its grating.
spec = ProcessSpec("SFG", WaveSpec(lam_p, "e", "pump"), signal, pump_shape=PumpShape(0, 300e-15))
print(f"upconverted output: {spec.output.center_wavelength * 1e9:.2f} nm")
print(f"poling period: {abs(spec.poling()) * 1e6:.4f} um")

# Step 3: joint spectrum and its mode structure.
jsa = build_jsa(spec)
modes = schmidt_decompose(jsa)
print(f"kappa_0^2 = {modes.kappas[0] ** 2:.4f}, Schmidt number K = {schmidt_number(modes):.4f}")
print("leading weights:", np.round(modes.kappas[:4] ** 2, 5))

# Step 4: how hard to pump it.
p_req = required_pump_power(spec, jsa.normalization)
print(f"peak power for full conversion of mode 0: {p_req:.2f} W "
      f"(average {average_power(p_req, 300e-15, 76e6) * 1e3:.3f} mW at 76 MHz)")
theta = coupling_theta(spec, jsa.normalization, 22.0)
print(f"at 22 W: theta = {theta:.3f} rad, efficiencies {np.round(efficiencies(modes.kappas[:3], theta), 4)}")

# Same device, longer crystal: coupling grows linearly with length.
longer = spec.with_(length=2 * spec.length)
print(f"doubling the length cuts the power to {required_pump_power(longer, jsa.normalization):.2f} W "
      "(normalization held fixed)")
