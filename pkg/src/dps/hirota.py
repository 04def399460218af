"""Direct method: Hirota (discrete sine-Gordon) evolution and frame integration.

This is the independent oracle for the loop-group construction.  ``u`` is
evolved quad by quad from Cauchy data on the two axes, then the frame is
integrated by ordered products of the moving-frame matrices ``U`` and ``V``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchFailure, CompatibilityViolation, ConfigError
from .lattice import AngleField, FrameField, Rect
from .loops import LaurentLoop, NormalizedLoop
from .potentials import Table, delta_minus_sq, delta_plus_sq

RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class AxisData:
    """Cauchy data ``u(n, 0)``, ``u(0, m)`` together with ``p(n)``, ``q(m)``."""

    u_row: Table
    u_col: Table
    p: Table
    q: Table

    def __post_init__(self):
        if abs(self.u_row(0) - self.u_col(0)) > 1e-14:
            raise ConfigError("axis data disagree at the origin")
        for name, t in (("p", self.p), ("q", self.q)):
            v = np.abs(t.values) / 2
            if np.any(v <= 0) or np.any(v >= 1):
                raise ConfigError(f"|{name}/2| must lie in (0, 1)")

    @property
    def rect(self):
        """Largest rectangle on which the data determine ``u``."""
        return Rect(max(self.u_row.start, self.p.start), min(self.u_row.stop, self.p.stop + 1),
                    max(self.u_col.start, self.q.start), min(self.u_col.stop, self.q.stop + 1))

    @classmethod
    def random(cls, rng, rect, p=0.8, q=0.8, scale=np.pi):
        """Uniform axis angles in ``(-scale, scale]`` with constant ``p``, ``q``."""
        row = rng.uniform(-scale, scale, rect.shape[0])
        col = rng.uniform(-scale, scale, rect.shape[1])
        col[-rect.m_min] = row[-rect.n_min]
        return cls(Table(rect.n_min, row), Table(rect.m_min, col),
                   Table.constant(p, rect.n_min, rect.n_max), Table.constant(q, rect.m_min, rect.m_max))

    @classmethod
    def from_csv(cls, row_path, col_path, p, q):
        """Two-column CSV files (index, value) for the row and column data."""
        return cls(_read_table(row_path), _read_table(col_path), p, q)


def _read_table(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    idx = [int(r[0]) for r in rows]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise ConfigError(f"{path}: indices must be consecutive")
    return Table(idx[0], [float(r[1]) for r in rows])


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def hirota_residual(u, u1, u2, u12, k):
    """``sin((u12-u1-u2+u)/4) - k sin((u12+u1+u2+u)/4)``."""
    return math.sin((u12 - u1 - u2 + u) / 4) - k * math.sin((u12 + u1 + u2 + u) / 4)


def hirota_update(u, u1, u2, k):
    """Forward corner ``u12`` on the principal branch ``|u12-u1-u2+u| < 2 pi``.

    With ``X = (u12-u1-u2+u)/4`` and ``c = (u1+u2)/2`` the equation reads
    ``sin X = k sin(X + c)``, hence ``tan X = k sin c / (1 - k cos c)``;
    ``|k| < 1`` keeps the denominator positive.
    """
    c = 0.5 * (u1 + u2)
    X = math.atan2(k * math.sin(c), 1.0 - k * math.cos(c))
    return 4.0 * X + u1 + u2 - u


def _corner_solve(known, which, k):
    """Solve the quad equation for the corner ``which`` in {00, 10, 01, 11}.

    ``known`` maps the other three corner labels to values.  Writing the
    unknown as ``t = 4 s``, the equation is ``sin(sg*s + a) = k sin(s + b)``
    and ``tan s`` follows linearly; the root nearest the ``k = 0`` solution
    is returned.
    """
    signs = {"11": 1, "00": 1, "10": -1, "01": -1}
    sg = signs[which]
    a = sum(signs[c] * v for c, v in known.items()) / 4
    b = sum(known.values()) / 4
    s0 = math.atan2(-(math.sin(a) - k * math.sin(b)), sg * math.cos(a) - k * math.cos(b))
    lin = -sg * a
    s = s0 + math.pi * round((lin - s0) / math.pi)
    return 4.0 * s


def evolve_u(ax, rect=None, tol=RESIDUAL_TOL):
    """Fill ``u`` on ``rect`` (which must contain the origin) from axis data.

    The first quadrant uses :func:`hirota_update`; other quadrants solve for
    the corner facing away from the origin.  Each solved quad is checked
    against the equation; a residual above ``tol`` raises BranchFailure.
    """
    rect = ax.rect if rect is None else rect
    if (0, 0) not in rect:
        raise ConfigError("lattice rectangle must contain the base point (0, 0)")
    vals = np.full(rect.shape, np.nan)

    def put(n, m, v):
        vals[rect.index(n, m)] = v

    def get(n, m):
        return vals[rect.index(n, m)]

    for n in range(rect.n_min, rect.n_max + 1):
        put(n, 0, ax.u_row(n))
    for m in range(rect.m_min, rect.m_max + 1):
        put(0, m, ax.u_col(m))

    order = sorted((s for s in rect.sites() if s[0] != 0 and s[1] != 0),
                   key=lambda s: (abs(s[0]) + abs(s[1]), s))
    for n, m in order:
        sn, sm = (1 if n > 0 else -1), (1 if m > 0 else -1)
        i, j = min(n, n - sn), min(m, m - sm)
        k = ax.p(i) * ax.q(j) / 4
        corners = {"00": (i, j), "10": (i + 1, j), "01": (i, j + 1), "11": (i + 1, j + 1)}
        which = next(c for c, s in corners.items() if s == (n, m))
        if which == "11":
            v = hirota_update(get(i, j), get(i + 1, j), get(i, j + 1), k)
        else:
            v = _corner_solve({c: get(*s) for c, s in corners.items() if c != which}, which, k)
        put(n, m, v)
        r = hirota_residual(get(i, j), get(i + 1, j), get(i, j + 1), get(i + 1, j + 1), k)
        if abs(r) > tol:
            raise BranchFailure(f"Hirota residual {r:.2e}", site=(n, m))
    return AngleField(rect, vals)


def hirota_residuals(u, p, q):
    """Sitewise residual array over all quads of ``u``."""
    r = u.rect
    out = np.zeros((r.shape[0] - 1, r.shape[1] - 1))
    for n in range(r.n_min, r.n_max):
        for m in range(r.m_min, r.m_max):
            out[n - r.n_min, m - r.m_min] = hirota_residual(
                u(n, m), u(n + 1, m), u(n, m + 1), u(n + 1, m + 1), p(n) * q(m) / 4)
    return out


def u_loop(u, u1, p):
    """``Delta_+ U`` as a Laurent polynomial."""
    e = np.exp(-0.5j * (u1 - u))
    return LaurentLoop(0, [np.diag([e, 1 / e]), 0.5j * p * np.array([[0, 1], [1, 0]])])


def v_loop(u, u2, q):
    """``Delta_- V`` as a Laurent polynomial."""
    e = np.exp(0.5j * (u2 + u))
    return LaurentLoop(-1, [-0.5j * q * np.array([[0, e], [1 / e, 0]]), np.eye(2)])


def U_step(u, p, n, m):
    pn = p(n)
    return NormalizedLoop(u_loop(u(n, m), u(n + 1, m), pn), det_plus=delta_plus_sq(pn))


def V_step(u, q, n, m):
    qm = q(m)
    return NormalizedLoop(v_loop(u(n, m), u(n, m + 1), qm), det_minus=delta_minus_sq(qm))


def _walk(u, p, q, rect, rows_first):
    """Frames by products along one axis first, then along the other."""
    F = {(0, 0): NormalizedLoop.identity()}

    def step(site, d):
        n, m = site
        if d == (1, 0):
            return F[site] @ U_step(u, p, n, m)
        if d == (-1, 0):
            return F[site] @ U_step(u, p, n - 1, m).inverse()
        if d == (0, 1):
            return F[site] @ V_step(u, q, n, m)
        return F[site] @ V_step(u, q, n, m - 1).inverse()

    def line(start, axis, lo, hi):
        n0, m0 = start
        for sgn, stop in ((1, hi), (-1, lo)):
            d = (sgn, 0) if axis == 0 else (0, sgn)
            cur = start
            while (cur[axis] - stop) * sgn < 0:
                nxt = (cur[0] + d[0], cur[1] + d[1])
                F[nxt] = step(cur, d)
                cur = nxt

    if rows_first:
        line((0, 0), 0, rect.n_min, rect.n_max)
        for n in range(rect.n_min, rect.n_max + 1):
            line((n, 0), 1, rect.m_min, rect.m_max)
    else:
        line((0, 0), 1, rect.m_min, rect.m_max)
        for m in range(rect.m_min, rect.m_max + 1):
            line((0, m), 0, rect.n_min, rect.n_max)
    return F


def _loop_distance(a, b):
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    diff = np.abs(a.padded(lo, hi) - b.padded(lo, hi)).max()
    scale = max(np.abs(a.coeff).max(), 1.0)
    return diff / scale


def direct_frame(u, p, q, rect=None, tol=1e-10):
    """Integrate ``F_1 = F U``, ``F_2 = F V`` from ``F(0, 0) = Id``.

    Both integration orders are computed; their relative coefficientwise
    distance must stay below ``tol`` (CompatibilityViolation otherwise).
    """
    rect = u.rect if rect is None else rect
    if (0, 0) not in rect:
        raise ConfigError("lattice rectangle must contain the base point (0, 0)")
    A = _walk(u, p, q, rect, rows_first=True)
    B = _walk(u, p, q, rect, rows_first=False)
    residuals = {}
    for s in rect.sites():
        d = _loop_distance(A[s].loop, B[s].loop)
        residuals[s] = d
        if d > tol:
            raise CompatibilityViolation(f"integration paths disagree by {d:.2e}", site=s)
    return FrameField(rect, {s: A[s] for s in rect.sites()}, p, q,
                      residuals=residuals, provenance="direct")


def phi_angles(u, n, m):
    """The four vertex angles at ``(n, m)``, reduced to ``[0, 2 pi)``."""
    u1, u2 = u(n + 1, m), u(n, m + 1)
    ub1, ub2 = u(n - 1, m), u(n, m - 1)
    phis = (-(u2 + u1) / 2, (ub1 + u2) / 2, -(ub2 + ub1) / 2, (u1 + ub2) / 2)
    return tuple(float(np.mod(x, 2 * np.pi)) for x in phis)


def q_field(u):
    """``Q = exp(i phi1)`` with ``phi1 = -(u2 + u1)/2`` on sites having both forward neighbours."""
    r = u.rect
    v = u.values
    Q = np.exp(-0.5j * (v[1:, :-1] + v[:-1, 1:]))
    return Rect(r.n_min, r.n_max - 1, r.m_min, r.m_max - 1), Q


def q_form_residuals(u, p, q):
    """Residuals of ``Q12 Q = M(Q2, k2) M(Q1, k1)`` with ``M(Q, k) = (Q-k)/(1-kQ)``.

    ``k1`` and ``k2`` are ``p q / 4`` at the shifted sites.
    """
    rect, Q = q_field(u)
    out = []
    for n in range(rect.n_min, rect.n_max):
        for m in range(rect.m_min, rect.m_max):
            i, j = rect.index(n, m)
            k1 = p(n + 1) * q(m) / 4
            k2 = p(n) * q(m + 1) / 4
            lhs = Q[i + 1, j + 1] * Q[i, j]
            rhs = _moebius(Q[i, j + 1], k2) * _moebius(Q[i + 1, j], k1)
            out.append(abs(lhs - rhs))
    return np.array(out)


def _moebius(Q, k):
    return (Q - k) / (1 - k * Q)
