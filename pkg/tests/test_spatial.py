import math

import numpy as np
import pytest

from pulsegate import spatial
from pulsegate.errors import GridError, TruncationError

X = np.linspace(-20e-6, 20e-6, 241)
Y = np.linspace(-18e-6, 18e-6, 217)


def test_gaussian_effective_area_oracle():
    w = 4e-6
    f = spatial.gaussian_profile(X, Y, w, w)
    # int f^3 for f = sqrt(2/(pi w^2)) exp(-r^2/w^2)
    ov = (2 / (math.pi * w * w)) ** 1.5 * math.pi * w * w / 3
    assert spatial.effective_area(f, f, f) == pytest.approx(1 / ov ** 2, rel=1e-9)


def test_elliptic_modes():
    fp = spatial.gaussian_profile(X, Y, 3e-6, 2.5e-6)
    fi = spatial.gaussian_profile(X, Y, 4e-6, 3e-6)
    fo = spatial.gaussian_profile(X, Y, 3.5e-6, 2.8e-6)
    a = spatial.effective_area(fp, fi, fo)
    # Cauchy-Schwarz: overlap <= max|f_p| so A_eff >= 1/max|f_p|^2
    assert a >= 1 / np.max(fp.values) ** 2
    assert 20e-12 < a < 200e-12


def test_parity_zero_gives_infinite_area():
    f = spatial.gaussian_profile(X, Y, 4e-6, 3e-6)
    odd = spatial.TransverseProfile(X, Y, f.values * X[:, None] / 4e-6).normalized()
    assert math.isinf(spatial.effective_area(f, f, odd))


def test_grid_checks():
    with pytest.raises(TruncationError):
        spatial.gaussian_profile(X, Y, 8e-6, 3e-6)
    f = spatial.gaussian_profile(X, Y, 4e-6, 3e-6)
    g = spatial.gaussian_profile(X[:-1], Y, 4e-6, 3e-6)
    with pytest.raises(GridError):
        spatial.effective_area(f, f, g)


def test_profile_file_roundtrip(tmp_path):
    f = spatial.gaussian_profile(X, Y, 4e-6, 3e-6, x0=1e-6)
    spatial.write_profile(f, tmp_path / "p.txt")
    back = spatial.read_profile(tmp_path / "p.txt")
    np.testing.assert_allclose(back.x, X, atol=1e-15)
    np.testing.assert_allclose(back.values, f.values, rtol=1e-9, atol=1e-6 * f.values.max())
