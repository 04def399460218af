"""Birkhoff (Wiener-Hopf) splitting of 2x2 Laurent loops on the unit circle.

``split_minus_plus`` writes ``phi = minus @ plus`` with ``minus(inf) = Id``;
``split_plus_minus`` writes ``phi = plus @ minus`` with ``plus(0) = Id``.

The inverse of the normalized minus factor, ``Y = Id + sum_k C_k lambda**-k``,
is determined by requiring that ``Y @ phi`` has no negative powers.  Keeping
``K`` unknown blocks and the equations for ``lambda**-1 .. lambda**-K`` gives a
block Toeplitz system ``C T = R`` with ``T[k, j] = phi_{k-j}``.  ``Y`` has
poles exactly at the zeros of ``det phi`` inside the disk, so its
coefficients decay geometrically and the truncation is sized from those
roots.  For a Laurent polynomial ``phi`` both factors come out as Laurent
polynomials again: ``plus = [Y @ phi]_{>=0}`` has the band ``[0, phi.hi]``.

The stored residual is the absolute band norm of ``phi - product`` and the
solver aims for ``residual_tol`` in that norm.  Frame products on larger
lattices have coefficients in the thousands and the absolute error can
sit at the rounding floor; when doubling ``K`` no longer halves the
residual, ``residual_tol * max(1, |phi|)`` is accepted instead.
"""
from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lapack, lu_factor, lu_solve

from .errors import NoConvergence, SingularOnCircle, SingularToeplitz
from .loops import ID2, LaurentLoop, evaluate, multiply


class Order(enum.Enum):
    PLUS_MINUS = "plus_minus"
    MINUS_PLUS = "minus_plus"


@dataclass(frozen=True)
class SolverConfig:
    truncation_K: int = 8
    residual_tol: float = 1e-10
    max_K: int = 1024
    circle_samples: int = 64
    min_circle_det: float = 1e-10
    cond_warn: float = 1e12

    def __post_init__(self):
        if not 1 <= self.truncation_K <= self.max_K:
            raise ValueError("need 1 <= truncation_K <= max_K")
        if self.residual_tol <= 0:
            raise ValueError("residual_tol must be positive")


@dataclass(frozen=True)
class BirkhoffSplit:
    plus: LaurentLoop
    minus: LaurentLoop
    residual: float
    order: Order
    K: int

    def product(self):
        if self.order is Order.PLUS_MINUS:
            return multiply(self.plus, self.minus)
        return multiply(self.minus, self.plus)

    def to_json(self):
        return json.dumps({
            "order": self.order.value,
            "K": self.K,
            "residual": self.residual,
            "plus": json.loads(self.plus.to_json()),
            "minus": json.loads(self.minus.to_json()),
        })


class ConditionWarning(UserWarning):
    pass


def circle_points(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def _check_circle(phi, cfg):
    d = phi.det()
    vals = np.array([d.evaluate(z) for z in circle_points(cfg.circle_samples)])
    worst = np.abs(vals).min()
    if worst < cfg.min_circle_det:
        raise SingularOnCircle(f"|det| drops to {worst:.3e} on the unit circle")


def _initial_K(phi, cfg):
    roots = phi.det().roots()
    inside = np.abs(roots[np.abs(roots) < 1.0])
    width = phi.hi - phi.lo
    if inside.size == 0 or inside.max() < 1e-8:
        guess = width + 1
    else:
        r = inside.max()
        mult = int(np.sum(np.abs(inside - r) < 1e-6))
        # k**(mult-1) r**k < tol * 1e-3
        guess = math.ceil(math.log(cfg.residual_tol * 1e-3) / math.log(r))
        guess += 4 * mult + width
    return int(min(max(cfg.truncation_K, guess), cfg.max_K))


def _solve_blocks(phi, K, cfg):
    """Solve for C_1..C_K; returns array (K, 2, 2)."""
    P = phi.padded(-(K - 1), K - 1)
    k = np.arange(K)
    blocks = P[(k[:, None] - k[None, :]) + K - 1]          # (K, K, 2, 2), [k, j] = phi_{k-j}
    T = blocks.transpose(0, 2, 1, 3).reshape(2 * K, 2 * K)
    R = -phi.padded(-K, -1)[::-1]                           # R_j = -phi_{-j}, j = 1..K
    R = R.transpose(1, 0, 2).reshape(2, 2 * K)
    A = np.ascontiguousarray(T.T)
    with warnings.catch_warnings():
        # exact singularity is reported below as SingularToeplitz
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(A, check_finite=False)
    if np.any(np.abs(np.diag(lu)) == 0):
        raise SingularToeplitz("Toeplitz system is exactly singular")
    gecon, = lapack.get_lapack_funcs(("gecon",), (lu,))
    rcond, _ = gecon(lu, np.abs(A).sum(axis=0).max(), norm="1")
    if rcond < 1e-15:
        raise SingularToeplitz(f"Toeplitz system is rank deficient (rcond={rcond:.2e})")
    if rcond < 1.0 / cfg.cond_warn:
        warnings.warn(f"ill-conditioned Toeplitz system, cond ~ {1 / rcond:.2e}", ConditionWarning)
    X = lu_solve((lu, piv), R.T, check_finite=False)        # (2K, 2) = C^T stacked
    # one step of iterative refinement; T gets badly conditioned on large lattices
    X += lu_solve((lu, piv), R.T - A @ X, check_finite=False)
    return X.reshape(K, 2, 2).transpose(0, 2, 1)


def _series_inverse(C, K):
    """Coefficients A_0..A_K of (Id + sum C_k z^k)^{-1}."""
    A = np.zeros((K + 1, 2, 2), dtype=complex)
    A[0] = ID2
    for j in range(1, K + 1):
        A[j] = -np.einsum("kab,kbc->ac", C[:j], A[j - 1::-1])
    return A


def _minus_plus_at(phi, K, cfg):
    C = _solve_blocks(phi, K, cfg)
    Y = LaurentLoop(-K, np.concatenate([C[::-1], ID2[None]]))
    top = max(phi.hi, 0)
    plus = LaurentLoop(0, multiply(Y, phi).padded(0, top))
    A = _series_inverse(C, K)
    minus = LaurentLoop(-K, A[::-1])
    residual = (phi - multiply(minus, plus)).band_norm()
    return minus, plus, residual


def split_minus_plus(phi, cfg=SolverConfig()):
    """``phi = minus @ plus`` with ``minus`` normalized to Id at infinity."""
    _check_circle(phi, cfg)
    K = _initial_K(phi, cfg)
    target = cfg.residual_tol * max(1.0, phi.band_norm())
    prev = None
    while True:
        minus, plus, residual = _minus_plus_at(phi, K, cfg)
        if residual <= cfg.residual_tol:
            return BirkhoffSplit(plus, minus, residual, Order.MINUS_PLUS, K)
        # relative acceptance only once a larger K stops helping
        stalled = prev is not None and residual > 0.5 * prev
        if residual <= target and (stalled or K >= cfg.max_K):
            return BirkhoffSplit(plus, minus, residual, Order.MINUS_PLUS, K)
        if K >= cfg.max_K:
            raise NoConvergence(f"residual {residual:.3e} above {target:.1e} at K={K}")
        prev = residual
        K = min(2 * K, cfg.max_K)


def split_plus_minus(phi, cfg=SolverConfig()):
    """``phi = plus @ minus`` with ``plus`` normalized to Id at zero."""
    s = split_minus_plus(phi.flipped(), cfg)
    return BirkhoffSplit(s.minus.flipped(), s.plus.flipped(), s.residual, Order.PLUS_MINUS, s.K)


def factor_uniqueness_check(phi, split, samples=16):
    """Largest pointwise deviation of ``phi`` from the product over circle samples."""
    prod = split.product()
    return max(float(np.linalg.norm(evaluate(phi, z) - evaluate(prod, z), 2))
               for z in circle_points(samples))
