"""Discrete flow of a constant torsion curve and its Frenet frame.

The SU(2) Frenet frame ``Phi`` moves by ``Phi_1 = Phi L`` along the curve and
``Phi_2 = Phi M`` in the flow direction; the gauge ``F = Phi G`` with
``G = diag(e^{i(u1-u)/4}, e^{-i(u1-u)/4})`` turns it into the extended frame
of a PS surface when ``a = p`` and ``b = 4/q``.

SO(3) columns are read from ``Phi`` through ``v <-> v1 s1 + v2 s2 + v3 s3``:
``T = Phi s1 Phi^-1``, ``N = Phi s2 Phi^-1``, ``B = Phi s3 Phi^-1``.  With this
convention the Sym surface at ``lambda0`` equals ``lambda0 S gamma`` up to a
translation, where ``S = diag(1, -1, 1)`` accounts for the sign of ``y``
in the su(2) identification used for surfaces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStep
from .loops import SIGMA1, SIGMA2, SIGMA3
from .potentials import delta_minus_sq, delta_plus_sq

S_FLIP = np.diag([1.0, -1.0, 1.0])


def rot1(x):
    c, s = math.cos(x / 2), math.sin(x / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def rot3(x):
    return np.diag([np.exp(-0.5j * x), np.exp(0.5j * x)])


def nu(a, lam):
    return 2 * math.atan(a * lam / 2)


def mu(b, lam):
    return 2 * math.atan(2 / (b * lam))


def frenet_L(u, a, lam0, n, m):
    """``R1(-nu) R3((u(n+2,m) - u)/2)``, ``nu = 2 arctan(a(n) lam/2)``."""
    return rot1(-nu(a(n), lam0)) @ rot3((u(n + 2, m) - u(n, m)) / 2)


def frenet_M(u, b, lam0, n, m):
    """``R3(-(u2+u1)/2) R1(mu) R3((u12+u)/2)``, ``mu = 2 arctan(2/(b(m) lam))``."""
    b_m = b(m)
    if b_m * lam0 == 0:
        raise ValueError("b * lambda must not vanish")
    u0, u1, u2, u12 = u(n, m), u(n + 1, m), u(n, m + 1), u(n + 1, m + 1)
    return rot3(-(u2 + u1) / 2) @ rot1(mu(b_m, lam0)) @ rot3((u12 + u0) / 2)


def gauge_G(u, n, m):
    x = (u(n + 1, m) - u(n, m)) / 4
    return np.diag([np.exp(1j * x), np.exp(-1j * x)])


def U_matrix(u, p, lam0, n, m):
    pn = p(n)
    e = np.exp(-0.5j * (u(n + 1, m) - u(n, m)))
    M = np.array([[e, 0.5j * pn * lam0], [0.5j * pn * lam0, 1 / e]])
    return M / math.sqrt(delta_plus_sq(pn).evaluate(lam0).real)


def V_matrix(u, q, lam0, n, m):
    qm = q(m)
    e = np.exp(0.5j * (u(n, m + 1) + u(n, m)))
    M = np.array([[1, -0.5j * qm * e / lam0], [-0.5j * qm / (e * lam0), 1]])
    return M / math.sqrt(delta_minus_sq(qm).evaluate(lam0).real)


def gauge_check(u, p, q, lam0, sites, tol=1e-10):
    """``|G^-1 L G_1 - U|`` and ``|G^-1 M G_2 - V|`` at the given sites, with ``a = p``, ``b = 4/q``."""
    a = p
    b = lambda m: 4.0 / q(m)
    worst_L = worst_M = 0.0
    for n, m in sites:
        G = gauge_G(u, n, m)
        Gi = np.linalg.inv(G)
        dL = Gi @ frenet_L(u, a, lam0, n, m) @ gauge_G(u, n + 1, m) - U_matrix(u, p, lam0, n, m)
        dM = Gi @ frenet_M(u, b, lam0, n, m) @ gauge_G(u, n, m + 1) - V_matrix(u, q, lam0, n, m)
        worst_L = max(worst_L, float(np.abs(dL).max()))
        worst_M = max(worst_M, float(np.abs(dM).max()))
    return {"lambda": lam0, "L": worst_L, "M": worst_M, "tol": tol,
            "pass": bool(worst_L <= tol and worst_M <= tol), "sites": len(sites)}


def su2_to_so3(Phi):
    """Columns ``T, N, B`` of the rotation induced by ``Phi``."""
    Pi = np.linalg.inv(Phi)
    cols = []
    for s in (SIGMA1, SIGMA2, SIGMA3):
        X = Phi @ s @ Pi
        cols.append([0.5 * np.trace(X @ t).real for t in (SIGMA1, SIGMA2, SIGMA3)])
    return np.array(cols).T


@dataclass
class DiscreteCurve:
    """Vertices ``gamma(n)`` with Frenet frames on ``n0 .. n0+len-1`` at flow time ``m``."""

    n0: int
    m: int
    gamma: np.ndarray
    Phi: np.ndarray

    @property
    def frames(self):
        return np.array([su2_to_so3(P) for P in self.Phi])

    def frame_defect(self):
        """Largest deviation of ``(T, N, B)`` from a right-handed orthonormal frame."""
        worst = 0.0
        for R in self.frames:
            worst = max(worst, float(np.abs(R.T @ R - np.eye(3)).max()), abs(np.linalg.det(R) - 1))
        return worst


def segment_length(a, lam0):
    """Edge length of the curve for segment parameter ``a``."""
    return a / (1 + (a * lam0 / 2) ** 2)


def initial_curve(u, a, lam0, n_count, m=0, Phi0=None):
    """Curve at flow time ``m`` from the Frenet equation ``Phi_1 = Phi L``.

    Edges are ``gamma_1 - gamma = a/(1 + (a lam/2)^2) T``; this edge length
    is what the Sym formula produces for the gauged frame and is not part
    of the flow equations themselves.
    """
    Phi = [np.eye(2, dtype=complex) if Phi0 is None else np.asarray(Phi0, dtype=complex)]
    gamma = [np.zeros(3)]
    for n in range(n_count - 1):
        T = su2_to_so3(Phi[-1])[:, 0]
        gamma.append(gamma[-1] + segment_length(a(n), lam0) * T)
        Phi.append(Phi[-1] @ frenet_L(u, a, lam0, n, m))
    return DiscreteCurve(0, m, np.array(gamma), np.array(Phi))


def flow_angle(u, n, m):
    """``w = -(u(n, m+1) + u(n+1, m))/2``."""
    return -(u(n, m + 1) + u(n + 1, m)) / 2


def curvature_angle(u, n, m):
    """``k = (u(n+1, m) - u(n-1, m))/2``."""
    return (u(n + 1, m) - u(n - 1, m)) / 2


def tan_recursion(w, k1, a, b):
    """``w_1`` from ``tan((w_1 + k_1)/2) = (b+a)/(b-a) tan(w/2)``, modulo ``2 pi``."""
    if b == a:
        raise DegenerateStep("b == a makes the flow recursion singular")
    half = math.atan((b + a) / (b - a) * math.tan(w / 2))
    return 2 * half - k1


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def evolve_curve(curve, u, a, b, lam0, m_steps, tol=1e-9):
    """Flow ``gamma_2 = gamma + delta (cos w T + sin w N)`` for ``m_steps`` steps.

    ``w`` along each curve is generated by the tan recursion from its value
    at the first vertex and compared with ``-(u_2 + u_1)/2`` modulo
    ``2 pi``; the largest discrepancy is returned with the curves.
    """
    curves = [curve]
    worst = 0.0
    for _ in range(m_steps):
        c = curves[-1]
        m = c.m
        bm = b(m)
        delta = bm / (1 + (bm / 2) ** 2 * lam0 ** 2)
        N = len(c.gamma)
        w = [flow_angle(u, c.n0, m)]
        for n in range(c.n0, c.n0 + N - 1):
            w1 = tan_recursion(w[-1], curvature_angle(u, n + 1, m), a(n), bm)
            # tan only fixes w1 mod 2 pi; continuity picks the representative
            w1 += 2 * math.pi * round((w[-1] - w1) / (2 * math.pi))
            w.append(w1)
            worst = max(worst, abs(_wrap(w1 - flow_angle(u, n + 1, m))))
        gamma, Phi = [], []
        for i in range(N):
            n = c.n0 + i
            R = su2_to_so3(c.Phi[i])
            gamma.append(c.gamma[i] + delta * (math.cos(w[i]) * R[:, 0] + math.sin(w[i]) * R[:, 1]))
            Phi.append(c.Phi[i] @ frenet_M(u, b, lam0, n, m))
        curves.append(DiscreteCurve(c.n0, m + 1, np.array(gamma), np.array(Phi)))
    if worst > tol:
        raise DegenerateStep(f"tan recursion drifts from the angle field by {worst:.2e}")
    return curves, worst


def congruence_to_mesh(curves, mesh, lam0):
    """Rigid-fit residual between ``lam0 S gamma`` over all curves and the mesh rows."""
    from .surfaces import fit_rigid_motion

    X, Y = [], []
    for c in curves:
        for i, g in enumerate(c.gamma):
            site = (c.n0 + i, c.m)
            if site in mesh.rect:
                X.append(lam0 * S_FLIP @ g)
                Y.append(mesh[site])
    R, t, res = fit_rigid_motion(np.array(X), np.array(Y))
    return res, R, t
