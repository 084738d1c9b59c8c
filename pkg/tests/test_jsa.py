import numpy as np
import pytest

from pulsegate import dispersion as d
from pulsegate.errors import ConfigError, EmptyJSAError
from pulsegate.jsa import (GAUSS_PM_COEFF, ProcessSpec, PumpShape, build_jsa, default_grids,
                           phasematching_matrix, read_jsa, write_jsa)
from pulsegate.spectra import FrequencyGrid


def test_normalized_with_positive_N(qpg_jsa):
    assert qpg_jsa.norm_sq() == pytest.approx(1.0, abs=1e-12)
    assert qpg_jsa.normalization > 0
    assert qpg_jsa.values.shape == (512, 512)


def test_support_fits_inside_default_grids(qpg_jsa):
    # sinc side lobes decay slowly; require the outer 5% band to hold little weight
    p = np.abs(qpg_jsa.values) ** 2
    b = p.shape[0] // 20
    inner = p[b:-b, b:-b].sum()
    assert 1 - inner / p.sum() < 1e-2


def test_output_derived_by_energy_conservation(qpg_spec):
    w_p, w_i, w_o = qpg_spec.omegas
    assert w_o == pytest.approx(w_i + w_p, rel=1e-15)
    with pytest.raises(ConfigError):
        ProcessSpec("SFG", qpg_spec.pump, qpg_spec.input, d.WaveSpec(600e-9, "o", "output"))


def test_gvm_makes_input_axis_flat(qpg_spec):
    a_i, a_o = qpg_spec.linear_mismatch()
    assert abs(a_i) < 1e-6 * abs(a_o)


def test_gaussian_phasematching_form(qpg_spec):
    grids = default_grids(qpg_spec, 64)
    sinc = phasematching_matrix(qpg_spec, grids, "sinc")
    gauss = phasematching_matrix(qpg_spec, grids, "gauss")
    # recover x = dbeta L / 2 from the sinc branch near the center and compare
    x = np.linspace(0.1, 2.0, 20)
    assert np.allclose(np.exp(-GAUSS_PM_COEFF * x ** 2), np.exp(-0.193 * x ** 2))
    assert gauss.max() == pytest.approx(1.0, abs=1e-3) and sinc.max() == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ConfigError):
        phasematching_matrix(qpg_spec, grids, "lorentz")


def test_gaussian_form_is_also_single_mode(qpg_spec):
    from pulsegate.schmidt import schmidt_decompose
    s = schmidt_decompose(build_jsa(qpg_spec, form="gauss"))
    assert s.kappas[0] ** 2 > 0.99


def test_empty_overlap_raises(qpg_spec):
    gi, go = default_grids(qpg_spec, 64)
    far = FrequencyGrid(go.center + 200 * qpg_spec.pump_shape.sigma, go.spacing, go.count)
    with pytest.raises(EmptyJSAError):
        build_jsa(qpg_spec, (gi, far))


def test_file_roundtrip(tmp_path, qpg_spec):
    j = build_jsa(qpg_spec, count=32)
    write_jsa(j, tmp_path / "j.txt")
    assert (tmp_path / "j.txt").read_text().startswith("# jsa v1\n")
    back = read_jsa(tmp_path / "j.txt")
    np.testing.assert_allclose(back.values, j.values, rtol=0, atol=1e-14 * np.abs(j.values).max())
    assert back.normalization == j.normalization and back.flavor is j.flavor


def test_pump_from_file(tmp_path, qpg_spec):
    from pulsegate.spectra import write_spectral_amplitude
    amp = qpg_spec.pump_amplitude()
    write_spectral_amplitude(amp, tmp_path / "pump.txt")
    spec = qpg_spec.with_(pump_shape=PumpShape(path=str(tmp_path / "pump.txt")))
    grids = default_grids(qpg_spec, 128)
    a = build_jsa(qpg_spec, grids)
    b = build_jsa(spec, grids)
    assert abs(np.vdot(a.values, b.values)) * a.weight ** 2 == pytest.approx(1.0, abs=1e-6)


def test_dfg_shaper_builds(qpg_spec):
    lam_in = qpg_spec.output.center_wavelength
    spec = ProcessSpec("DFG", qpg_spec.pump, d.WaveSpec(lam_in, "o", "input"))
    assert spec.output.center_wavelength == pytest.approx(1550e-9, rel=1e-9)
    j = build_jsa(spec, count=128)
    assert j.norm_sq() == pytest.approx(1.0)
    # swapping the roles of input and output leaves the required grating unchanged
    assert spec.poling() == pytest.approx(qpg_spec.poling(), rel=1e-9)
