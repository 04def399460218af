import json

import numpy as np
import pytest

from dps.birkhoff import (Order, SolverConfig, factor_uniqueness_check, split_minus_plus,
                          split_plus_minus, circle_points)
from dps.errors import NoConvergence, SingularOnCircle, SingularToeplitz
from dps.hirota import u_loop, v_loop
from dps.loops import ID2, SIGMA1, LaurentLoop, LoopClass, check_twisted, evaluate, multiply
from dps.potentials import a_minus, a_plus, diag_phase


def coeff_gap(a, b):
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    return np.abs(a.padded(lo, hi) - b.padded(lo, hi)).max()


def random_uv_product(rng, count=6, p=1.0, q=1.0):
    loop = LaurentLoop.identity()
    for _ in range(count):
        u, u1 = rng.uniform(-np.pi, np.pi, 2)
        f = u_loop(u, u1, p) if rng.random() < 0.5 else v_loop(u, u1, q)
        loop = multiply(loop, f)
    return loop


def test_identity_split():
    for split in (split_minus_plus, split_plus_minus):
        s = split(LaurentLoop.identity())
        assert coeff_gap(s.plus, LaurentLoop.identity()) < 1e-15
        assert coeff_gap(s.minus, LaurentLoop.identity()) < 1e-15
        assert s.residual < 1e-15


def test_plus_class_is_its_own_plus_factor():
    phi = LaurentLoop(0, [2 * ID2, SIGMA1])
    s = split_minus_plus(phi)
    assert coeff_gap(s.minus.trimmed(1e-13), LaurentLoop.identity()) < 1e-13
    assert coeff_gap(s.plus, phi) < 1e-13


def test_normalized_minus_is_its_own_minus_factor():
    phi = LaurentLoop(-1, [0.4j * SIGMA1, ID2])
    s = split_plus_minus(phi)
    assert coeff_gap(s.plus.trimmed(1e-13), LaurentLoop.identity()) < 1e-13
    assert coeff_gap(s.minus, phi) < 1e-13


def test_explicit_amsler_split_at_n0():
    # Phi = d A_-^m with d = diag(e^{i(l-s)}) splits as (d A_-^m d^-1) (d)
    q, s, l, m = 1.0, 0.0, np.pi / 4, 3
    d = diag_phase(l - s)
    Am = a_minus(q).loop
    phi = LaurentLoop.constant(d)
    for _ in range(m):
        phi = multiply(phi, Am)
    sp = split_minus_plus(phi)
    expect_minus = phi.right(np.linalg.inv(d))
    assert coeff_gap(sp.minus.trimmed(1e-13), expect_minus) < 1e-10
    assert coeff_gap(sp.plus, LaurentLoop.constant(d)) < 1e-10


def test_random_products_plus_minus(rng):
    phi = random_uv_product(rng)
    s = split_plus_minus(phi)
    assert s.residual < 1e-10
    assert s.order is Order.PLUS_MINUS
    for z in circle_points(8):
        rebuilt = evaluate(phi, z) @ np.linalg.inv(evaluate(s.minus, z))
        assert np.abs(rebuilt - evaluate(s.plus, z)).max() < 1e-9


def test_normalization_and_classes(rng):
    phi = random_uv_product(rng)
    mp = split_minus_plus(phi)
    pm = split_plus_minus(phi)
    assert np.array_equal(mp.minus[0], ID2)
    assert np.array_equal(pm.plus[0], ID2)
    assert mp.minus.loop_class() is LoopClass.MINUS_NORMALIZED
    assert pm.plus.loop_class() is LoopClass.PLUS_NORMALIZED
    assert mp.plus.lo >= 0 and pm.minus.hi <= 0


def test_factors_inherit_twisting(rng):
    phi = random_uv_product(rng)
    for s in (split_minus_plus(phi), split_plus_minus(phi)):
        assert check_twisted(s.plus, 1e-10) and check_twisted(s.minus, 1e-10)


def test_idempotence(rng):
    phi = random_uv_product(rng)
    s = split_minus_plus(phi)
    again = split_minus_plus(s.product())
    assert coeff_gap(again.plus, s.plus) < 1e-10
    assert coeff_gap(again.minus, s.minus) < 1e-10


def test_truncation_level_independence(rng):
    phi = random_uv_product(rng)
    a = split_minus_plus(phi, SolverConfig(truncation_K=40))
    b = split_minus_plus(phi, SolverConfig(truncation_K=90))
    assert a.K != b.K
    assert coeff_gap(a.plus, b.plus) < 1e-9
    k = min(a.K, b.K)
    assert np.abs(a.minus.padded(-k, 0) - b.minus.padded(-k, 0)).max() < 1e-9


def test_uniqueness_check_examples():
    assert factor_uniqueness_check(LaurentLoop.identity(), split_minus_plus(LaurentLoop.identity())) < 1e-15
    # Amsler at (n, m) = (1, 1): A_+^-1 diag(e^{i(l-s)}) A_-
    q, l = 1.0, np.pi / 4
    phi = (a_plus(q).inverse().right(diag_phase(l)) @ a_minus(q)).loop
    assert factor_uniqueness_check(phi, split_minus_plus(phi)) < 1e-10
    # surface of revolution at (n, m) = (2, 1): (A_+ L A_-)^-2 (A_+ L A_-)^-1
    from dps.loops import NormalizedLoop
    L = NormalizedLoop.constant(diag_phase(np.pi / 4))
    eta = a_plus(q) @ L @ a_minus(q)
    phi = (eta.inverse() @ eta.inverse() @ eta.inverse()).loop
    assert factor_uniqueness_check(phi, split_minus_plus(phi)) < 1e-10


def test_singular_on_circle():
    phi = LaurentLoop(0, [ID2, -ID2])          # (1 - lambda) Id vanishes at 1
    with pytest.raises(SingularOnCircle):
        split_minus_plus(phi)


def test_nontrivial_partial_indices_rejected():
    phi = LaurentLoop(-1, [np.diag([0, 1]), np.zeros((2, 2)), np.diag([1, 0])])   # diag(lambda, 1/lambda)
    with pytest.raises(SingularToeplitz):
        split_minus_plus(phi)


def test_no_convergence_at_small_ceiling(rng):
    phi = random_uv_product(rng, count=6, p=1.9, q=1.9)
    with pytest.raises(NoConvergence):
        split_minus_plus(phi, SolverConfig(truncation_K=2, max_K=4, residual_tol=1e-14))


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(truncation_K=0)
    with pytest.raises(ValueError):
        SolverConfig(residual_tol=0)


def test_json_dump(rng):
    s = split_minus_plus(random_uv_product(rng, count=2))
    d = json.loads(s.to_json())
    assert d["order"] == "minus_plus" and d["residual"] == s.residual
