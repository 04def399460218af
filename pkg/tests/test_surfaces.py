import numpy as np
import pytest

from dps.errors import ConfigError
from dps.surfaces import (AmslerConfig, RevolutionConfig, build_amsler, check_amsler_constraints,
                          check_dp_revolution, check_rotation_symmetry, fit_rigid_motion,
                          lambda_fit_residual)
from dps.sym import validate_geometry


def test_revolution_rotation(revolution8):
    rep = check_rotation_symmetry(revolution8.mesh(1.0), 1e-8)
    assert rep["pass"], rep
    assert abs(rep["det"] - 1) < 1e-10
    # the shift advances the profile by the angle 2c
    assert np.isclose(rep["angle"], 2 * revolution8.config.c, atol=1e-8)
    assert abs(rep["translation_along_axis"]) < 1e-8


def test_revolution_axis_and_reduction(revolution8):
    rep = check_rotation_symmetry(revolution8.mesh(1.0))
    assert rep["stated_axis_abs_sorted_gap"] < 1e-8
    assert check_dp_revolution(revolution8.u, 1.0)["residual"] < 1e-8


def test_revolution_geometry(revolution8):
    for lam in (0.5, 1.0, 2.0):
        assert validate_geometry(revolution8.mesh(lam), 1e-8, 1e-9).passed


def test_amsler_is_not_a_revolution(amsler8):
    assert not check_rotation_symmetry(amsler8.mesh(1.0), 1e-8)["pass"]


def test_amsler_constraints(amsler8):
    rep = check_amsler_constraints(amsler8, 1e-7)
    assert rep["pass"], rep
    for key in ("lines", "lambda_fit", "constraint", "dPIII", "reflection", "u_symmetry"):
        assert rep[key] < 1e-7


def test_lambda_fit_rejects_generic(random_surface):
    worst = max(lambda_fit_residual(random_surface["ff"].frames[s], 0.8)
                for s in [(2, 3), (4, 4), (3, 1)])
    assert worst > 1e-4


def test_amsler_other_parameters():
    surf = build_amsler(AmslerConfig(q=0.7, s=0.3, ell=1.2, size=6))
    rep = check_amsler_constraints(surf, 1e-7)
    assert rep["pass"], rep


def test_degenerate_amsler_is_a_line():
    surf = build_amsler(AmslerConfig(q=1.0, s=0.5, ell=0.5, size=4))
    assert surf.degenerate and surf.u is None
    P = surf.mesh(1.0).vertices()
    s = np.linalg.svd(P - P[0], compute_uv=False)
    assert s[1] < 1e-10 * max(s[0], 1.0)
    assert check_amsler_constraints(surf)["degenerate"]


def test_configs_validate():
    with pytest.raises(ConfigError):
        RevolutionConfig(q=2.5)
    with pytest.raises(ConfigError):
        RevolutionConfig(ell=2.5)
    with pytest.raises(ConfigError):
        AmslerConfig(size=1)


def test_rigid_fit_recovers_motion(rng):
    from scipy.spatial.transform import Rotation
    X = rng.normal(size=(20, 3))
    R = Rotation.from_rotvec([0.3, -0.2, 0.9]).as_matrix()
    t = np.array([1.0, 2.0, -0.5])
    R2, t2, res = fit_rigid_motion(X, X @ R.T + t)
    assert res < 1e-12 and np.allclose(R2, R) and np.allclose(t2, t)
