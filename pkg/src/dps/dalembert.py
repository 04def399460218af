"""Loop-group construction of frames from potentials, and its converse.

``build_frame`` factors ``Phi = D(n)^-1 F_+(n)^-1 G_-(m) = V_- V_+^-1`` and
returns ``F = G_- V_+``.  All loops are kept unnormalized; the Birkhoff
solver only ever sees Laurent polynomials.  Because the plus factor of a
polynomial loop is itself polynomial, the frame is assembled from that
factor (finite band) rather than from the truncated minus series.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .birkhoff import SolverConfig, split_minus_plus, split_plus_minus
from .errors import BranchAmbiguity, DependenceViolation, NonUnitaryFrame
from .lattice import AngleField, FrameField, Rect
from .loops import LaurentLoop, NormalizedLoop, ScalarLaurent, adjugate, multiply
from .potentials import Table, diagonal_correction

UNITARY_TOL = 1e-8


def default_max_band(rect):
    return 4 * (max(abs(rect.n_min), abs(rect.n_max)) + max(abs(rect.m_min), abs(rect.m_max))) + 8


def worker_count():
    """Thread count from ``DPS_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("DPS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SiteFrame:
    frame: NormalizedLoop
    V_minus: NormalizedLoop
    V_plus: NormalizedLoop
    h: float
    residual: float


def build_frame(pot, n, m, cfg=SolverConfig(), correction=None, max_band=None):
    """Frame at ``(n, m)`` with its factors ``V_-``, ``V_+`` and phase ``h``."""
    corr = diagonal_correction(pot, min(n, 0), max(n, 0)) if correction is None else correction
    D = corr.D(n)
    Fp = pot.F_plus(n, max_band)
    Gm = pot.G_minus(m, max_band)
    phi = Fp.inverse().left(D.conj().T) @ Gm
    split = split_minus_plus(phi.loop, cfg)
    V_minus = NormalizedLoop(split.minus.trimmed(0.0), det_minus=phi.det_minus)
    adj_w = adjugate(split.plus)
    V_plus = NormalizedLoop(adj_w, det_plus=phi.det_plus)
    frame = NormalizedLoop(multiply(Gm.loop, adj_w, max_band=max_band),
                           Gm.det_plus * phi.det_plus, Gm.det_minus)
    v0 = adj_w[0]
    h = float(2 * np.angle(v0[0, 0]))
    f1 = frame.evaluate(1.0)
    dev = float(np.abs(f1 @ f1.conj().T - np.eye(2)).max())
    if dev > UNITARY_TOL:
        raise NonUnitaryFrame(f"frame deviates from unitarity by {dev:.2e} at lambda=1", site=(n, m))
    return SiteFrame(frame, V_minus, V_plus, h, split.residual)


def build_frame_field(pot, rect, cfg=SolverConfig(), max_band=None, threads=None):
    """Per-site factorization over ``rect``; sites are independent work items."""
    max_band = default_max_band(rect) if max_band is None else max_band
    corr = diagonal_correction(pot, min(rect.n_min, 0), max(rect.n_max, 0))
    # fill the product caches serially so workers only read them
    for n in range(rect.n_min, rect.n_max + 1):
        pot.F_plus(n, max_band)
    for m in range(rect.m_min, rect.m_max + 1):
        pot.G_minus(m, max_band)
    sites = list(rect.sites())
    threads = worker_count() if threads is None else threads

    def work(s):
        return build_frame(pot, s[0], s[1], cfg, corr, max_band)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, sites))
    else:
        results = [work(s) for s in sites]
    ff = FrameField(rect, {}, pot.p, pot.q, provenance="dalembert")
    for s, r in zip(sites, results):
        ff.frames[s] = r.frame
        ff.V_minus[s] = r.V_minus
        ff.V_plus[s] = r.V_plus
        ff.h[s] = r.h
        ff.residuals[s] = r.residual
    return ff


def _wrap4pi(x):
    """Representative of ``x`` mod ``4 pi`` in ``(-2 pi, 2 pi]``."""
    y = np.mod(x + 2 * np.pi, 4 * np.pi) - 2 * np.pi
    return 2 * np.pi if y == -2 * np.pi else float(y)


def mc_row_angle(ff, n, m, lam=1.0):
    """``u(n+1, m) - u(n, m)`` mod ``4 pi`` from the diagonal of ``F^-1 F_1``."""
    p = ff.p(n)
    M = np.linalg.solve(ff.evaluate((n, m), lam), ff.evaluate((n + 1, m), lam))
    e = M[0, 0] * np.sqrt(1 + (p * lam / 2) ** 2)
    return _wrap4pi(-2 * np.angle(e))


def mc_col_angle(ff, n, m, lam=1.0):
    """``u(n, m+1) + u(n, m)`` mod ``4 pi`` from the off-diagonal of ``F^-1 F_2``."""
    q = ff.q(m)
    M = np.linalg.solve(ff.evaluate((n, m), lam), ff.evaluate((n, m + 1), lam))
    e = M[0, 1] * np.sqrt(1 + (q / (2 * lam)) ** 2) / (-0.5j * q / lam)
    return _wrap4pi(2 * np.angle(e))


def extract_angle_field(ff, u00=0.0, tol=1e-6):
    """Recover ``u`` from the Maurer-Cartan forms of a frame field.

    Angles are propagated along the row ``m = 0`` from ``u(0, 0) = u00``
    and then up and down every column.  The remaining row relations are
    checked modulo ``4 pi``; a mismatch raises BranchAmbiguity.  A genuine
    branch slip is a jump of order ``2 pi``, while frames on large lattices
    carry errors near ``1e-8``, hence the loose default ``tol``.  ``u00`` is
    a genuine free parameter: ``u + c (-1)^m`` yields the same frame.
    Values are reported in ``(-2 pi, 2 pi]``.
    """
    r = ff.rect
    vals = np.zeros(r.shape)
    u = {(0, 0): float(u00)}
    for n in range(0, r.n_max):
        u[(n + 1, 0)] = u[(n, 0)] + mc_row_angle(ff, n, 0)
    for n in range(-1, r.n_min - 1, -1):
        u[(n, 0)] = u[(n + 1, 0)] - mc_row_angle(ff, n, 0)
    for n in range(r.n_min, r.n_max + 1):
        for m in range(0, r.m_max):
            u[(n, m + 1)] = -u[(n, m)] + mc_col_angle(ff, n, m)
        for m in range(-1, r.m_min - 1, -1):
            u[(n, m)] = -u[(n, m + 1)] + mc_col_angle(ff, n, m)
    for n in range(r.n_min, r.n_max):
        for m in range(r.m_min, r.m_max + 1):
            if m == 0:
                continue
            d = _wrap4pi(u[(n + 1, m)] - u[(n, m)] - mc_row_angle(ff, n, m))
            if abs(d) > tol:
                raise BranchAmbiguity(f"row and column propagation disagree by {d:.2e} mod 4 pi",
                                      site=(n, m))
    for s in r.sites():
        vals[r.index(*s)] = _wrap4pi(u[s])
    return AngleField(r, vals)


def potentials_from_axis(u):
    """``alpha(n)``, ``beta(m)`` from axis values of an angle field."""
    r = u.rect
    u00 = u(0, 0)
    alpha = [0.5 * u(n + 1, 0) + 0.5 * u(n, 0) - u00 for n in range(r.n_min, r.n_max)]
    beta = [0.5 * u(0, m + 1) + 0.5 * u(0, m) for m in range(r.m_min, r.m_max)]
    return Table(r.n_min, alpha), Table(r.m_min, beta)


@dataclass
class ExtractedPotentials:
    alpha: Table
    beta: Table
    p: Table
    q: Table
    ell_plus: np.ndarray
    ell_minus: np.ndarray
    dependence: tuple


def _coeff_distance(a, b):
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    return float(np.abs(a.padded(lo, hi) - b.padded(lo, hi)).max())


def extract_potentials(ff, cfg=SolverConfig(), tol=1e-8):
    """Split every frame both ways and read the normalized potentials.

    ``F_+`` must not depend on ``m`` and ``G_-`` not on ``n``
    (DependenceViolation otherwise).  The first-order coefficient of
    ``F_+(n+1) - F_+(n)`` is ``(i/2) p [[0, e^{-i alpha}], [e^{i alpha}, 0]]``
    and likewise for ``G_-`` with ``-(i/2) q`` and ``e^{+-i beta}``.
    """
    r = ff.rect
    Fp, Gm = {}, {}
    worst_F = worst_G = 0.0
    for s in r.sites():
        loop = ff.frames[s].loop
        Fp[s] = split_plus_minus(loop, cfg).plus
        Gm[s] = split_minus_plus(loop, cfg).minus
    for s in r.sites():
        n, m = s
        worst_F = max(worst_F, _coeff_distance(Fp[s], Fp[(n, r.m_min)]))
        worst_G = max(worst_G, _coeff_distance(Gm[s], Gm[(r.n_min, m)]))
    if worst_F > tol:
        raise DependenceViolation(f"plus factor varies with m by {worst_F:.2e}")
    if worst_G > tol:
        raise DependenceViolation(f"minus factor varies with n by {worst_G:.2e}")
    m0, n0 = r.m_min, r.n_min
    ell_p, alpha, p = [], [], []
    for n in range(r.n_min, r.n_max):
        c = Fp[(n + 1, m0)][1] - Fp[(n, m0)][1]
        a, b = c[0, 1] / 0.5j, c[1, 0] / 0.5j       # p e^{-i alpha}, p e^{i alpha}
        ell_p.append(a)
        pn = ff.p(n)
        alpha.append(float(np.angle(b / pn)))
        p.append(pn)
    ell_m, beta, q = [], [], []
    for m in range(r.m_min, r.m_max):
        c = Gm[(n0, m + 1)][-1] - Gm[(n0, m)][-1]
        a, b = c[0, 1] / -0.5j, c[1, 0] / -0.5j     # q e^{i beta}, q e^{-i beta}
        ell_m.append(a)
        qm = ff.q(m)
        beta.append(float(np.angle(a / qm)))
        q.append(qm)
    return ExtractedPotentials(Table(r.n_min, alpha), Table(r.m_min, beta),
                               Table(r.n_min, p), Table(r.m_min, q),
                               np.array(ell_p), np.array(ell_m), (worst_F, worst_G))


def angle_distance(a, b, period=2 * np.pi):
    """Distance between angles modulo ``period``."""
    d = np.mod(np.asarray(a) - np.asarray(b) + period / 2, period) - period / 2
    return np.abs(d)


def frame_distance(f, g, lams=(0.5, 1.0, 2.0)):
    """Largest entrywise distance of two frame fields at the given real lambdas."""
    worst = 0.0
    for s in f.rect.sites():
        for lam in lams:
            worst = max(worst, float(np.abs(f.evaluate(s, lam) - g.evaluate(s, lam)).max()))
    return worst
