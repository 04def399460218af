import math

import numpy as np
import pytest

from dps.curve_flow import (congruence_to_mesh, evolve_curve, frenet_L, frenet_M, gauge_check,
                            gauge_G, initial_curve, mu, nu, rot1, rot3, tan_recursion)
from dps.errors import DegenerateStep
from dps.hirota import AxisData, direct_frame, evolve_u
from dps.lattice import Rect
from dps.loops import SIGMA1
from dps.sym import build_mesh


def test_rotation_identities():
    assert np.allclose(rot1(np.pi), -1j * SIGMA1)
    assert np.allclose(rot1(0.3) @ rot1(0.4), rot1(0.7))
    assert np.allclose(rot3(0.3) @ rot3(-0.3), np.eye(2))
    assert np.allclose(rot3(2 * np.pi), -np.eye(2))


def test_angle_limits():
    assert nu(1.0, 0.0) == 0.0
    assert math.isclose(nu(1e6, 1.0), np.pi, rel_tol=1e-5)
    assert math.isclose(mu(1e-9, 1.0), np.pi, rel_tol=1e-6)
    assert abs(mu(1e9, 1.0)) < 1e-8


@pytest.fixture(scope="module")
def flow_data():
    rng = np.random.default_rng(17)
    rect = Rect(0, 7, 0, 5)
    ax = AxisData.random(rng, rect, p=0.8, q=0.8, scale=1.0)
    return ax, evolve_u(ax, rect)


def test_frenet_matrices_special_unitary(flow_data):
    ax, u = flow_data
    b = lambda m: 4.0 / ax.q(m)
    for lam in (0.5, 1.0, 2.0):
        for M in (frenet_L(u, ax.p, lam, 1, 2), frenet_M(u, b, lam, 1, 2)):
            assert np.allclose(M @ M.conj().T, np.eye(2)) and np.isclose(np.linalg.det(M), 1)


def test_gauge_identity(flow_data):
    ax, u = flow_data
    sites = [(n, m) for n in range(5) for m in range(4)]
    for lam in (0.5, 1.0, 2.0):
        rep = gauge_check(u, ax.p, ax.q, lam, sites, 1e-10)
        assert rep["pass"], rep


def test_gauge_identity_negative_q(flow_data):
    ax, u = flow_data
    neg = AxisData(ax.u_row, ax.u_col, ax.p, type(ax.q)(ax.q.start, -ax.q.values))
    u2 = evolve_u(neg, u.rect)
    assert gauge_check(u2, neg.p, neg.q, 1.0, [(1, 1), (2, 3)], 1e-10)["pass"]


def test_flow_congruent_to_mesh(flow_data):
    ax, u = flow_data
    ff = direct_frame(u, ax.p, ax.q)
    b = lambda m: 4.0 / ax.q(m)
    for lam in (0.5, 1.0, 2.0):
        c0 = initial_curve(u, ax.p, lam, 6, Phi0=np.linalg.inv(gauge_G(u, 0, 0)))
        curves, gap = evolve_curve(c0, u, ax.p, b, lam, 4)
        assert gap < 1e-9
        assert all(c.frame_defect() < 1e-12 for c in curves)
        res, R, _ = congruence_to_mesh(curves, build_mesh(ff, lam), lam)
        assert res < 1e-7


def test_tan_recursion_degenerate():
    with pytest.raises(DegenerateStep):
        tan_recursion(0.3, 0.1, 2.0, 2.0)
    w1 = tan_recursion(0.3, 0.1, 1.0, 3.0)
    assert math.isclose(math.tan((w1 + 0.1) / 2), 2 * math.tan(0.15))
