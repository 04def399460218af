"""Sym formula, surface meshes, the discrete PS validators and OBJ export.

Points of E^3 are identified with su(2) through
``(x, y, z) <-> (i/2)(x s1 - y s2 + z s3)``, i.e. the matrix
``(i/2) [[z, x + iy], [x - iy, -z]]``.
"""
from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .lattice import Rect
from .loops import NormalizedLoop, lambda_log_derivative, traceless


def xyz_to_su2(v):
    x, y, z = v
    return 0.5j * np.array([[z, x + 1j * y], [x - 1j * y, -z]])


def su2_to_xyz(X):
    z = (-2j * X[0, 0]).real
    w = -2j * X[0, 1]
    return np.array([w.real, w.imag, z])


@dataclass(frozen=True)
class SurfacePoint:
    x: float
    y: float
    z: float
    su2: np.ndarray

    @property
    def xyz(self):
        return np.array([self.x, self.y, self.z])


def sym_point(frame, lam0):
    """Traceless part of ``lambda dF/dlambda F^-1`` at real ``lam0 > 0``.

    Accepts a :class:`NormalizedLoop` or a bare :class:`LaurentLoop`; the
    scalar normalizer only contributes to the trace.
    """
    if lam0 <= 0:
        raise ValueError("lambda0 must be real and positive")
    loop = frame.loop if isinstance(frame, NormalizedLoop) else frame
    X = traceless(lambda_log_derivative(loop, lam0))
    x, y, z = su2_to_xyz(X)
    return SurfacePoint(float(x), float(y), float(z), X)


@dataclass
class SurfaceMesh:
    """Points ``f(n, m)`` on a lattice rectangle, stored as an array ``(Nn, Nm, 3)``."""

    rect: Rect
    points: np.ndarray
    lam0: float
    provenance: str = ""
    su2_defect: float = 0.0

    def __getitem__(self, site):
        return self.points[self.rect.index(*site)]

    def vertices(self):
        """Row-major vertex list (``n`` outer)."""
        return self.points.reshape(-1, 3)


def build_mesh(ff, lam0, provenance=None):
    r = ff.rect
    pts = np.zeros(r.shape + (3,))
    defect = 0.0
    for s in r.sites():
        sp = sym_point(ff.frames[s], lam0)
        X = sp.su2
        defect = max(defect, float(np.abs(X + X.conj().T).max()), abs(np.trace(X)))
        pts[r.index(*s)] = sp.xyz
    prov = ff.provenance if provenance is None else provenance
    return SurfaceMesh(r, pts, float(lam0), prov, defect)


@dataclass
class GeometryReport:
    lam0: float
    tol: float
    entries: list = field(default_factory=list)
    a: dict = field(default_factory=dict)
    b: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(e["pass"] for e in self.entries)

    def worst(self, check):
        vals = [e["value"] for e in self.entries if e["check"] == check]
        return max(vals) if vals else 0.0

    def violations(self):
        return [e for e in self.entries if not e["pass"]]

    def to_dict(self):
        return {
            "lambda": self.lam0,
            "tol": self.tol,
            "pass": self.passed,
            "worst": {c: self.worst(c) for c in ("planarity", "edge_a", "edge_b")},
            "a": {str(k): v for k, v in sorted(self.a.items())},
            "b": {str(k): v for k, v in sorted(self.b.items())},
            "entries": self.entries,
        }


def _entry(site, check, value, tol):
    return {"site": list(site), "check": check, "value": float(value), "tol": tol,
            "pass": bool(value <= tol)}


def validate_geometry(mesh, tol=1e-8, edge_tol=None):
    """Star planarity and opposite-edge equality with ``a = a(n)``, ``b = b(m)``.

    Planarity: third over first singular value of the four star edges.
    Edges: every length ``|f_1 - f|``, ``|f_12 - f_2|`` equals the reference
    ``a(n)`` measured at the lowest ``m`` (and likewise ``b(m)``).
    """
    edge_tol = tol if edge_tol is None else edge_tol
    r = mesh.rect
    P = mesh.points
    rep = GeometryReport(mesh.lam0, tol)
    Nn, Nm = r.shape
    for i in range(1, Nn - 1):
        for j in range(1, Nm - 1):
            f = P[i, j]
            E = np.array([P[i + 1, j] - f, P[i - 1, j] - f, P[i, j + 1] - f, P[i, j - 1] - f])
            s = np.linalg.svd(E, compute_uv=False)
            ratio = s[2] / s[0] if s[0] > 0 else 0.0
            rep.entries.append(_entry((r.n_min + i, r.m_min + j), "planarity", ratio, tol))
    for i in range(Nn - 1):
        ref = np.linalg.norm(P[i + 1, 0] - P[i, 0])
        rep.a[r.n_min + i] = float(ref)
        dev = max(abs(np.linalg.norm(P[i + 1, j] - P[i, j]) - ref) for j in range(Nm))
        rep.entries.append(_entry((r.n_min + i, r.m_min), "edge_a", dev, edge_tol))
    for j in range(Nm - 1):
        ref = np.linalg.norm(P[0, j + 1] - P[0, j])
        rep.b[r.m_min + j] = float(ref)
        dev = max(abs(np.linalg.norm(P[i, j + 1] - P[i, j]) - ref) for i in range(Nn))
        rep.entries.append(_entry((r.n_min, r.m_min + j), "edge_b", dev, edge_tol))
    return rep


def _fmt(x):
    # fixed format keeps output byte-stable; -0.0 is folded into 0.0
    x = float(x)
    if x == 0.0:
        x = 0.0
    return f"{x:.15e}"


def mesh_hash(mesh):
    return hashlib.sha256(np.ascontiguousarray(mesh.points, dtype="<f8").tobytes()).hexdigest()


def obj_text(mesh):
    r = mesh.rect
    Nn, Nm = r.shape
    out = io.StringIO()
    out.write("# discrete pseudospherical surface\n")
    out.write(f"# lattice n={r.n_min}..{r.n_max} m={r.m_min}..{r.m_max} lambda={mesh.lam0!r}\n")
    out.write(f"# provenance {mesh.provenance or 'none'}\n")
    out.write(f"# sha256 {mesh_hash(mesh)}\n")
    for v in mesh.vertices():
        out.write("v " + " ".join(_fmt(c) for c in v) + "\n")

    def idx(i, j):
        return i * Nm + j + 1

    for i in range(Nn - 1):
        for j in range(Nm - 1):
            out.write(f"f {idx(i, j)} {idx(i + 1, j)} {idx(i + 1, j + 1)} {idx(i, j + 1)}\n")
    return out.getvalue()


def export_obj(mesh, path):
    if mesh.points.size == 0:
        raise ValueError("empty mesh")
    with open(path, "w", newline="\n") as fh:
        fh.write(obj_text(mesh))


def export_polylines(curves, path, header=""):
    """Each curve (array ``(N, 3)``) as an OBJ polyline ``l i j ...``."""
    out = io.StringIO()
    out.write("# discrete curve flow\n")
    if header:
        out.write(f"# {header}\n")
    base = 1
    for c in curves:
        for v in c:
            out.write("v " + " ".join(_fmt(x) for x in v) + "\n")
        out.write("l " + " ".join(str(base + i) for i in range(len(c))) + "\n")
        base += len(c)
    with open(path, "w", newline="\n") as fh:
        fh.write(out.getvalue())


def report_json(obj):
    """Canonical JSON text (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"
