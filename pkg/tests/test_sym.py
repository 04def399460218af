import os

import numpy as np
import pytest

from dps.lattice import FrameField, Rect
from dps.loops import LaurentLoop, NormalizedLoop
from dps.surfaces import amsler_line
from dps.sym import (SurfaceMesh, build_mesh, export_obj, obj_text, su2_to_xyz, sym_point,
                     validate_geometry, xyz_to_su2)

DATA = os.path.join(os.path.dirname(__file__), "data")


def read_obj(path):
    v, f = [], []
    with open(path) as fh:
        for line in fh:
            if line.startswith("v "):
                v.append([float(x) for x in line.split()[1:]])
            elif line.startswith("f "):
                f.append([int(x) for x in line.split()[1:]])
    return np.array(v), f


def flat_mesh(nn, nm):
    rect = Rect(0, nn - 1, 0, nm - 1)
    pts = np.zeros((nn, nm, 3))
    for i in range(nn):
        for j in range(nm):
            pts[i, j] = (i, j, 0.0)
    return SurfaceMesh(rect, pts, 1.0)


def test_su2_identification_round_trip(rng):
    for _ in range(10):
        v = rng.normal(size=3)
        X = xyz_to_su2(v)
        assert np.allclose(X + X.conj().T, 0) and abs(np.trace(X)) < 1e-15
        assert np.allclose(su2_to_xyz(X), v)


def test_constant_frame_maps_to_origin():
    sp = sym_point(NormalizedLoop.identity(), 1.3)
    assert np.allclose(sp.xyz, 0)
    sp = sym_point(LaurentLoop.identity(), 0.4)
    assert np.allclose(sp.xyz, 0)
    with pytest.raises(ValueError):
        sym_point(NormalizedLoop.identity(), -1.0)


def test_amsler_first_edge(amsler8):
    mesh = amsler8.mesh(1.0)
    assert np.allclose(mesh[(1, 0)], [0.8, 0, 0], atol=1e-14)
    assert np.allclose(mesh[(0, 1)], amsler_line(amsler8.config, 1, np.pi / 4), atol=1e-14)
    assert np.allclose(mesh[(0, 0)], 0, atol=1e-15)


def test_geometry_passes(random_surface):
    for lam in (0.5, 1.0, 2.0):
        mesh = build_mesh(random_surface["ff"], lam)
        rep = validate_geometry(mesh, 1e-8, 1e-9)
        assert rep.passed, rep.violations()[:3]
        assert mesh.su2_defect < 1e-12


def test_perturbed_vertex_detected(random_surface):
    mesh = build_mesh(random_surface["ff"], 1.0)
    pts = mesh.points.copy()
    pts[2, 3] += 1e-3 * np.array([0.3, -0.5, 0.8])
    bad = SurfaceMesh(mesh.rect, pts, 1.0)
    rep = validate_geometry(bad, 1e-8, 1e-9)
    assert not rep.passed
    sites = {tuple(e["site"]) for e in rep.violations() if e["check"] == "planarity"}
    assert (2, 3) in sites


def test_flat_grid_reports():
    rep = validate_geometry(flat_mesh(4, 3))
    assert rep.passed
    assert rep.a == {0: 1.0, 1: 1.0, 2: 1.0} and rep.b == {0: 1.0, 1: 1.0}


def test_obj_counts(tmp_path):
    for nn, nv, nf in ((2, 4, 1), (3, 9, 4)):
        path = tmp_path / f"g{nn}.obj"
        export_obj(flat_mesh(nn, nn), path)
        v, f = read_obj(path)
        assert len(v) == nv and len(f) == nf
        assert all(len(face) == 4 for face in f)
        assert max(max(face) for face in f) == nv


def test_obj_is_stable_and_has_no_negative_zero():
    m = flat_mesh(2, 2)
    m.points[0, 0] = (-0.0, 0.0, -0.0)
    text = obj_text(m)
    assert "-0.000" not in text
    assert text == obj_text(m)
    assert text.count("# ") >= 3


def test_golden_amsler(amsler8):
    from dps.surfaces import AmslerConfig, build_amsler
    golden, faces = read_obj(os.path.join(DATA, "amsler_q1_s0_l0.785398_5x5.obj"))
    mesh = build_amsler(AmslerConfig(size=5)).mesh(1.0)
    assert np.abs(mesh.vertices() - golden).max() < 1e-12
    assert len(faces) == 16
    # the golden file itself must carry the closed-form straight lines
    assert np.allclose(golden[5], [0.8, 0, 0], atol=1e-12)
    assert np.allclose(golden[1], amsler_line(AmslerConfig(), 1, np.pi / 4), atol=1e-12)


def test_empty_mesh_rejected(tmp_path):
    m = SurfaceMesh(Rect(0, 0, 0, 0), np.zeros((0, 0, 3)), 1.0)
    with pytest.raises(ValueError):
        export_obj(m, tmp_path / "x.obj")
