import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import c

from pulsegate import dispersion as d
from pulsegate.errors import ConfigError, DomainError, GVMError

# Independent evaluation of the two Sellmeier fits at 190 degC (high-precision
# derivative), frozen here.
ORACLE = [
    ("e", 870e-9, 2.1778081272220633, 2.2570305061326725),
    ("o", 1550e-9, 2.2121076465773966, 2.2651747368770585),
    ("o", 557.2e-9, 2.3140381028380816, 2.54879311361202),
    ("e", 600e-9, 2.221626697598079, 2.394294887157716),
    ("o", 600e-9, 2.2981658808351257, 2.4938597398972764),
    ("e", 1550e-9, 2.1457684540149944, 2.191351861340955),
]


@pytest.mark.parametrize("axis,lam,n,ng", ORACLE)
def test_bulk_index_and_group_index(axis, lam, n, ng):
    m = d.congruent_ln(axis)
    assert m.n(lam) == pytest.approx(n, abs=1e-12)
    assert d.group_index(m, lam) == pytest.approx(ng, rel=1e-8)


def test_reference_temperature_values():
    # at the fits' reference temperature the thermal terms vanish
    assert d.congruent_ln("e", 297.65).n(1e-6) == pytest.approx(2.1594043057697916, abs=1e-12)
    assert d.congruent_ln("o", 297.65).n(1e-6) == pytest.approx(2.236352676585275, abs=1e-12)


def test_axis_aliases():
    assert d.congruent_ln("o").axis is d.Axis.ORDINARY
    assert d.congruent_ln("EXTRAORDINARY").axis is d.Axis.EXTRAORDINARY
    with pytest.raises(ConfigError):
        d.congruent_ln("x")


def test_window_is_enforced():
    with pytest.raises(DomainError):
        d.congruent_ln("e").n(3e-6)
    with pytest.raises(DomainError):
        d.WaveSpec(300e-9, "o", "input")


@settings(max_examples=40, deadline=None)
@given(st.floats(0.45e-6, 1.9e-6), st.sampled_from(["o", "e"]))
def test_richardson_matches_analytic_group_velocity(lam, axis):
    m = d.congruent_ln(axis)
    w = 2 * math.pi * c / lam
    assert d.group_velocity(m, w) == pytest.approx(d.group_velocity_analytic(m, w), rel=1e-6)


def test_fixed_index_group_velocity_is_phase_velocity():
    m = d.FixedIndexModel("o", index=2.0)
    assert d.group_velocity(m, 1.2e15) == pytest.approx(c / 2.0, rel=1e-12)


def test_gvm_pump_in_bulk_model():
    models = {a: d.congruent_ln(a) for a in d.Axis}
    lp = d.find_gvm_pump(d.WaveSpec(1550e-9, "o", "input"), "e", models, (0.6e-6, 1.2e-6))
    assert lp == pytest.approx(839.94e-9, abs=0.05e-9)
    vg_p = d.group_velocity(models[d.Axis.EXTRAORDINARY], 2 * math.pi * c / lp)
    vg_i = d.group_velocity(models[d.Axis.ORDINARY], 2 * math.pi * c / 1550e-9)
    assert vg_p == pytest.approx(vg_i, rel=1e-7)


def test_gvm_reports_gaps_when_not_bracketed():
    models = {a: d.congruent_ln(a) for a in d.Axis}
    with pytest.raises(GVMError) as err:
        d.find_gvm_pump(d.WaveSpec(1550e-9, "o", "input"), "e", models, (0.95e-6, 1.2e-6))
    assert len(err.value.gaps) == 2


def test_energy_conservation():
    assert d.output_wavelength("SFG", 1550e-9, 870e-9) == pytest.approx(557.2314e-9, abs=1e-13)
    lam = d.output_wavelength("DFG", 557.2314e-9, 870e-9)
    assert lam == pytest.approx(1550e-9, rel=1e-6)
    with pytest.raises(DomainError):
        d.output_wavelength("DFG", 1550e-9, 870e-9)


def test_poling_period_from_indices():
    b = [2 * math.pi * n / lam for n, lam in ((2.18, 870e-9), (2.21, 1550e-9), (2.32, 557.0e-9))]
    p = d.poling_period("SFG", *b)
    assert p.period == pytest.approx(4.2805e-6, abs=1e-10)
    assert p.needed and p.sign == -1


def test_poling_not_needed_when_matched():
    p = d.poling_period("SFG", 1.0, 2.0, 3.0)
    assert not p.needed and math.isinf(p.period) and math.isinf(p.signed)


def test_sfg_dfg_mismatch_under_role_swap():
    e, o = d.congruent_ln("e"), d.congruent_ln("o")
    w_p = 2 * math.pi * c / 840e-9
    w_i = 2 * math.pi * c / 1550e-9
    wi = w_i + np.linspace(-2e12, 2e12, 5)
    wo = wi + w_p + 1e11
    sfg = d.phase_mismatch("SFG", wi, wo, {"pump": e, "input": o, "output": o})
    dfg = d.phase_mismatch("DFG", wo, wi, {"pump": e, "input": o, "output": o})
    np.testing.assert_allclose(sfg, dfg, rtol=0, atol=1e-9 * np.max(np.abs(sfg)))


def test_poling_cancels_center_mismatch(qpg_spec):
    _, w_i, w_o = qpg_spec.omegas
    db = d.phase_mismatch(qpg_spec.flavor, w_i, w_o, qpg_spec.models, qpg_spec.poling())
    assert abs(db) < 1e-6


def test_material_yaml_roundtrip(tmp_path):
    m = d.congruent_ln("e", 400.0)
    d.save_material(m, tmp_path / "ln_e.yaml")
    back = d.load_material(tmp_path / "ln_e.yaml", 400.0)
    for lam in (0.6e-6, 1.0e-6, 1.6e-6):
        assert back.n(lam) == pytest.approx(m.n(lam), abs=1e-14)


def test_tabulated_material(tmp_path):
    m = d.congruent_ln("o")
    lam = np.linspace(0.5, 1.8, 200)
    p = tmp_path / "tab.txt"
    np.savetxt(p, np.column_stack([lam, m.n(lam * 1e-6)]), header="tabulated-index v1\naxis: o")
    t = d.load_material(p)
    assert t.axis is d.Axis.ORDINARY
    assert t.n(1.2e-6) == pytest.approx(m.n(1.2e-6), abs=1e-7)
    assert d.group_index(t, 1.2e-6) == pytest.approx(d.group_index(m, 1.2e-6), abs=1e-5)


def test_material_missing_key(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("axis: e\nform: jundt1997\n")
    with pytest.raises(ConfigError):
        d.load_material(p)
