import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from pulsegate import modematch as mm
from pulsegate.errors import ContractError, GridError
from pulsegate.schmidt import SchmidtData, schmidt_decompose
from pulsegate.spectra import FrequencyGrid, hermite_gauss_spectrum, overlap

GRID = FrequencyGrid.spanning(1.2e15, 8e13, 1024)
SIG = 2e12


def _device(kappas=(1.0,), orders=(0,), sigma=SIG):
    modes = np.array([hermite_gauss_spectrum(GRID, n, GRID.center, sigma).values for n in orders])
    return SchmidtData(np.array(kappas), modes, modes.copy(), GRID, GRID)


def test_gaussian_overlap_oracle():
    assert mm.gaussian_overlap_sq(2 * SIG, SIG) == pytest.approx(0.8, abs=1e-12)
    wide = hermite_gauss_spectrum(GRID, 0, GRID.center, 2 * SIG)
    assert abs(overlap(wide, _device().input_mode(0))) ** 2 == pytest.approx(0.8, abs=1e-6)


def test_matched_and_orthogonal_modes():
    dev = _device()
    state = mm.hermite_gauss_state(GRID, GRID.center, SIG, orders=(0, 1, 2, 3))
    p = mm.selection_probabilities(state, dev, math.pi / 2)
    assert p[0] == pytest.approx(1.0, abs=1e-10)
    assert np.all(p[1:] < 1e-10)
    assert mm.selectivity(state, dev, math.pi / 2, 0) == pytest.approx(1.0, abs=1e-9)


def test_parity_rule_for_wider_inputs():
    dev = _device()
    state = mm.hermite_gauss_state(GRID, GRID.center, 2 * SIG, orders=(0, 1, 2, 3))
    p = mm.selection_probabilities(state, dev, math.pi / 2)
    assert p[0] == pytest.approx(0.8, abs=1e-6)
    assert p[1] < 1e-8 and p[3] < 1e-8
    assert p[2] > 0.05


def test_global_phase_is_irrelevant():
    dev = _device((0.9, math.sqrt(0.19)), (0, 1))
    state = mm.hermite_gauss_state(GRID, GRID.center + SIG / 3, 1.3 * SIG, orders=(0, 1, 2))
    rotated = mm.InputState(tuple(m.__class__(m.grid, m.values * np.exp(1.3j), m.label) for m in state.modes),
                            state.weights)
    np.testing.assert_allclose(mm.selection_probabilities(state, dev, 1.0),
                               mm.selection_probabilities(rotated, dev, 1.0), atol=1e-14)


def test_probabilities_are_bounded():
    rng = np.random.default_rng(3)
    dev = _device((0.8, 0.6), (0, 1))
    for _ in range(20):
        state = mm.hermite_gauss_state(GRID, GRID.center + rng.normal() * SIG,
                                       SIG * rng.uniform(0.5, 3), orders=(0, 1, 2, 3))
        p = mm.selection_probabilities(state, dev, rng.uniform(0, 2 * math.pi))
        assert np.all((p >= 0) & (p <= 1))


def test_selectivity_target_out_of_range():
    state = mm.hermite_gauss_state(GRID, GRID.center, SIG, orders=(0, 1))
    with pytest.raises(IndexError):
        mm.selectivity(state, _device(), 1.0, 2)


def test_multimode_device_warns():
    with pytest.warns(mm.MultimodeDeviceWarning):
        mm.device_acceptance(_device((0.6, 0.8), (0, 1)))


def test_grid_mismatch():
    other = FrequencyGrid.spanning(1.2e15, 8e13, 512)
    state = mm.hermite_gauss_state(other, other.center, SIG, orders=(0,))
    with pytest.raises(GridError):
        mm.overlap_matrix(state, _device())


def test_state_validation():
    state = mm.hermite_gauss_state(GRID, GRID.center, SIG, orders=(0, 1))
    np.testing.assert_allclose(state.gram(), np.eye(2), atol=1e-10)
    with pytest.raises(ContractError):
        mm.InputState(state.modes, [0.7, 0.7])


def test_shaper_mode_is_nearly_gaussian():
    from pulsegate.acceptance import engineered_spec
    from pulsegate.jsa import build_jsa
    s = schmidt_decompose(build_jsa(engineered_spec(0, "DFG")))
    phi = s.input_mode(0)
    w = np.abs(phi.values) ** 2
    center = float(np.sum(phi.omega * w) / w.sum())

    def loss(sig):
        return -abs(overlap(hermite_gauss_spectrum(phi.grid, 0, center, sig), phi)) ** 2

    best = minimize_scalar(loss, bounds=(phi.grid.spacing * 3, phi.grid.half_span() / 6), method="bounded")
    assert -best.fun >= 0.8


def test_duration_sweep_on_engineered_gate(tmp_path, qpg_spec):
    from pulsegate.jsa import build_jsa, default_grids
    gi, go = default_grids(qpg_spec, 256)
    gi = FrequencyGrid.spanning(gi.center, 3 * gi.half_span(), 512)
    dev = schmidt_decompose(build_jsa(qpg_spec, (gi, go)))
    rows = mm.duration_sweep(dev, math.pi / 2, [1.0, 2.0], orders=(0, 1, 2))
    # at ratio 1 the Gaussian fit of phi_0 is almost perfectly matched
    assert rows[0, 1] > 0.98
    assert rows[1, 1] == pytest.approx(0.8, abs=0.02)
    mm.write_duration_sweep(rows, tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == mm.SWEEP_HEADER and lines[1] == "duration_ratio,p_0,p_1,p_2,selectivity"
