import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from pulsegate import timeorder as to
from pulsegate.errors import RangeError
from pulsegate.jsa import default_grids
from pulsegate.schmidt import schmidt_decompose
from pulsegate.spectra import overlap


@pytest.fixture(scope="module")
def small(qpg_spec):
    return to.Propagator(qpg_spec, default_grids(qpg_spec, 64, span=12.0), 200)


def test_zero_drive_is_identity(small):
    gf = small.propagate(0.0)
    np.testing.assert_allclose(gf.assembled(), np.eye(128), atol=1e-14)


def test_unitarity_at_random_drives(small):
    rng = np.random.default_rng(11)
    for s in rng.uniform(0.1, 8.0, 4):
        assert small.propagate(float(s)).unitarity_residual() <= 1e-6


def test_completeness_and_passivity(small):
    gf = small.propagate(2.0)
    ni = small.grids[0].count
    total = np.linalg.norm(gf.U_ca) ** 2 + np.linalg.norm(gf.U_aa) ** 2
    assert total == pytest.approx(ni, rel=1e-8)
    assert np.all(gf.conversion_amplitudes() <= 1 + 1e-10)


def test_first_order_limit_reproduces_jsa(small):
    gf = small.propagate(0.01)
    ana = schmidt_decompose(small.jsa)
    rig, eff = to.rigorous_schmidt(gf)
    u = gf.U_ca.conj().T
    g_w = small.jsa.weighted()
    corr = abs(np.vdot(g_w, u)) / (np.linalg.norm(g_w) * np.linalg.norm(u))
    assert corr >= 0.999
    ratio = rig.kappas[:4] / ana.kappas[:4]
    assert np.ptp(ratio) <= 0.01 * ratio.mean()
    assert ratio.mean() == pytest.approx(0.01, rel=1e-3)


def test_slice_convergence(qpg_spec):
    grids = default_grids(qpg_spec, 64, span=12.0)
    a = to.Propagator(qpg_spec, grids, 200).propagate(3.0)
    b = to.Propagator(qpg_spec, grids, 400).propagate(3.0)
    assert np.abs(a.assembled() - b.assembled()).max() <= 1e-6


def test_matches_independent_ode_solver(qpg_spec):
    grids = default_grids(qpg_spec, 20, span=8.0)
    prop = to.Propagator(qpg_spec, grids, 200)
    scale = 2.5
    ni, no = 20, 20
    L = qpg_spec.length

    def rhs(z, y):
        a = y[:ni * ni].reshape(ni, ni)
        cc = y[ni * ni:].reshape(no, ni)
        m = scale * prop._kernel(z)
        return np.concatenate([(-1j * m @ cc).ravel(), (-1j * m.conj().T @ a).ravel()])

    y0 = np.concatenate([np.eye(ni).ravel(), np.zeros(no * ni)]).astype(complex)
    sol = solve_ivp(rhs, (-L / 2, L / 2), y0, method="DOP853", rtol=1e-11, atol=1e-13)
    ref_ca = sol.y[ni * ni:, -1].reshape(no, ni)
    got = prop.propagate(scale, full=False).U_ca
    assert np.abs(got - ref_ca).max() <= 1e-6


def test_single_step_surrogate_is_analytic(qpg_spec):
    grids = default_grids(qpg_spec, 64, span=12.0)
    prop = to.Propagator(qpg_spec, grids, method="single")
    ana = schmidt_decompose(prop.jsa, max_modes=None)
    eff = prop.efficiency(math.pi / 2 / ana.kappas[0])
    assert eff >= 1 - 1e-6


def test_rigorous_modes_are_orthonormal(small):
    rig, eff = to.rigorous_schmidt(small.propagate(4.0))
    gi = small.grids[0]
    gram = rig.input_modes.conj() @ rig.input_modes.T * gi.spacing
    np.testing.assert_allclose(gram, np.eye(len(gram)), atol=1e-10)
    assert np.all(np.diff(eff) <= 1e-12)


def test_strong_drive_keeps_the_mode_family(small):
    # time ordering reshapes modes but a strongly driven mode still lives in the low-order subspace
    ana = schmidt_decompose(small.jsa)
    rig, _ = to.rigorous_schmidt(small.propagate(4.0))
    captured = sum(abs(overlap(ana.input_mode(k), rig.input_mode(0))) ** 2 for k in range(4))
    assert captured >= 0.5


def test_fidelity_helper(small):
    ana = schmidt_decompose(small.jsa)
    rig, _ = to.rigorous_schmidt(small.propagate(0.05))
    (fi, fo), = to.mode_fidelities(ana, rig, 1)
    assert fi > 0.999 and fo > 0.999


def test_golden_maximize_known_function():
    x, f, pts = to.golden_maximize(lambda x: -(x - 1.3) ** 2 + 2, 0.0, 3.0, tol=1e-8)
    assert x == pytest.approx(1.3, abs=1e-3) and f == pytest.approx(2.0, abs=1e-6)


def test_scan_without_interior_maximum(small):
    with pytest.raises(RangeError) as info:
        to.max_efficiency_scan(small.spec, scale_range=(0.1, 0.5), coarse=5, propagator=small)
    assert len(info.value.endpoints) == 2


def test_too_few_slices_rejected(qpg_spec):
    with pytest.raises(ValueError):
        to.propagate(qpg_spec, default_grids(qpg_spec, 16), 1.0, slices=10)


def test_curve_file(tmp_path):
    to.write_efficiency_curve(np.array([[0.5, 0.2], [1.0, 0.6]]), tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[:2] == [to.CURVE_HEADER, "pump_scale,efficiency"]


@pytest.mark.slow
def test_best_efficiency_is_grid_converged(qpg_spec):
    best = []
    for n in (128, 256):
        prop = to.Propagator(qpg_spec, None, 200, count=n)
        best.append(to.max_efficiency_scan(qpg_spec, propagator=prop).best_efficiency)
    assert abs(best[0] - best[1]) <= 1e-2
