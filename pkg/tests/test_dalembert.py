import numpy as np
import pytest

from dps.birkhoff import SolverConfig
from dps.dalembert import (angle_distance, build_frame, build_frame_field, extract_angle_field,
                           extract_potentials, frame_distance, mc_col_angle, mc_row_angle,
                           potentials_from_axis)
from dps.errors import DependenceViolation
from dps.hirota import direct_frame
from dps.lattice import Rect
from dps.loops import ID2
from dps.potentials import diagonal_correction, normalized_potential

LAMS = (0.5, 1.0, 2.0)


@pytest.fixture(scope="module")
def generic():
    rng = np.random.default_rng(5)
    return normalized_potential(np.r_[0, rng.uniform(-1.5, 1.5, 5)], rng.uniform(-1.5, 1.5, 6),
                                0.9, 1.1, (0, 5), (0, 5))


def test_origin_is_identity(generic):
    sf = build_frame(generic, 0, 0)
    for lam in LAMS:
        assert np.allclose(sf.frame.evaluate(lam), ID2, atol=1e-14)
    assert abs(sf.h) < 1e-14


def test_axis_m0(generic):
    corr = diagonal_correction(generic, 0, 5)
    for n in range(1, 5):
        sf = build_frame(generic, n, 0, correction=corr)
        for lam in LAMS:
            assert np.allclose(sf.V_minus.evaluate(lam), ID2, atol=1e-12)
        assert angle_distance(sf.h, corr.k(n)) < 1e-12


def test_axis_n0(generic):
    for m in range(1, 5):
        sf = build_frame(generic, 0, m)
        for lam in LAMS:
            assert np.allclose(sf.V_minus.evaluate(lam), generic.G_minus(m).evaluate(lam), atol=1e-12)
            assert np.allclose(sf.frame.evaluate(lam), generic.G_minus(m).evaluate(lam), atol=1e-12)
        assert angle_distance(sf.h, 0.0) < 1e-12


def test_unitary_and_twisted(generic):
    ff = build_frame_field(generic, Rect(0, 4, 0, 4))
    for s in ff.rect.sites():
        F = ff.evaluate(s, 1.0)
        assert np.abs(F @ F.conj().T - ID2).max() < 1e-12
        assert abs(np.linalg.det(ff.evaluate(s, 1.7)) - 1) < 1e-12


def test_amsler_axis_values(amsler8):
    u = amsler8.u
    target = 2 * (amsler8.config.ell - amsler8.config.s)
    for i in range(8):
        assert angle_distance(u(i, 0), target, 4 * np.pi) < 1e-10
        assert angle_distance(u(0, i), target, 4 * np.pi) < 1e-10


def test_round_trip(random_surface):
    rs = random_surface
    d = direct_frame(rs["u"], rs["axis"].p, rs["axis"].q)
    assert frame_distance(rs["ff"], d, LAMS) < 1e-8
    u = extract_angle_field(rs["ff"], rs["u"](0, 0))
    assert angle_distance(u.values, rs["u"].values, 4 * np.pi).max() < 1e-8
    ex = extract_potentials(rs["ff"])
    al, be = potentials_from_axis(rs["u"])
    assert angle_distance(ex.alpha.values, al.values).max() < 1e-8
    assert angle_distance(ex.beta.values, be.values).max() < 1e-8
    assert max(ex.dependence) < 1e-8


def test_angle_gauge_freedom(random_surface):
    """``u + c(-1)^m`` gives the same frame, so extraction accepts any ``u00``."""
    ff = random_surface["ff"]
    u0 = extract_angle_field(ff, 0.0)
    u1 = extract_angle_field(ff, 0.4)
    sign = (-1.0) ** np.arange(u0.rect.shape[1])
    assert angle_distance(u1.values - u0.values, 0.4 * sign[None, :], 4 * np.pi).max() < 1e-10


def test_maurer_cartan_shapes(random_surface):
    ff, u = random_surface["ff"], random_surface["u"]
    for n, m in ((0, 0), (2, 3), (4, 1)):
        assert angle_distance(mc_row_angle(ff, n, m), u(n + 1, m) - u(n, m), 4 * np.pi) < 1e-9
        assert angle_distance(mc_col_angle(ff, n, m), u(n, m + 1) + u(n, m), 4 * np.pi) < 1e-9
        M = np.linalg.solve(ff.evaluate((n, m), 1.3), ff.evaluate((n + 1, m), 1.3))
        assert np.isclose(abs(M[0, 1]), 0.8 * 1.3 / 2 / np.sqrt(1 + (0.4 * 1.3) ** 2))


def test_dependence_violation(random_surface):
    rs = random_surface
    ff = build_frame_field(rs["pot"], Rect(0, 3, 0, 3))
    # swapping two columns breaks the factorization structure
    ff.frames[(1, 1)], ff.frames[(1, 2)] = ff.frames[(1, 2)], ff.frames[(1, 1)]
    with pytest.raises(DependenceViolation):
        extract_potentials(ff)


def test_threads_are_deterministic(random_surface):
    pot = random_surface["pot"]
    rect = Rect(0, 4, 0, 4)
    a = build_frame_field(pot, rect, threads=1)
    b = build_frame_field(pot, rect, threads=4)
    for s in rect.sites():
        assert np.array_equal(a.frames[s].loop.coeff, b.frames[s].loop.coeff)


def test_negative_quadrant(rng):
    from dps.hirota import AxisData, evolve_u
    rect = Rect(-3, 2, -2, 3)
    ax = AxisData.random(rng, rect, p=0.8, q=0.8, scale=1.0)
    u = evolve_u(ax, rect)
    al, be = potentials_from_axis(u)
    pot = normalized_potential(al, be, ax.p, ax.q, (-3, 1), (-2, 2), require_alpha0=False)
    ff = build_frame_field(pot, rect, SolverConfig())
    assert frame_distance(ff, direct_frame(u, ax.p, ax.q), LAMS) < 1e-8
