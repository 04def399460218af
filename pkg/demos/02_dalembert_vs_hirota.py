"""
Two roads to the same surface
=============================

Random Cauchy data on the axes determine the angle field through the
Hirota equation; integrating U and V gives one frame field.  The same axis
data also give the potential functions alpha and beta, and splitting
``F_+^-1 G_-`` site by site gives a second frame field.  They agree.
"""
import numpy as np

from dps.dalembert import build_frame_field, extract_potentials, frame_distance, potentials_from_axis
from dps.hirota import AxisData, direct_frame, evolve_u, hirota_residuals
from dps.lattice import Rect
from dps.potentials import PotentialPair
from dps.sym import build_mesh, validate_geometry

rng = np.random.default_rng(1)
rect = Rect(0, 9, 0, 9)
ax = AxisData.random(rng, rect, p=0.8, q=0.8)

# direct method
u = evolve_u(ax, rect)
print("Hirota residual: %.1e" % np.abs(hirota_residuals(u, ax.p, ax.q)).max())
direct = direct_frame(u, ax.p, ax.q)

# loop-group method from the potential functions
alpha, beta = potentials_from_axis(u)
pot = PotentialPair(alpha, beta, ax.p, ax.q, require_alpha0=False)
dal = build_frame_field(pot, rect)
print("frame gap at lambda = 0.5, 1, 2: %.1e" % frame_distance(dal, direct))

# and back: read alpha, beta off the frames
ex = extract_potentials(direct)
print("alpha recovered:", np.allclose(ex.alpha.values, alpha.values, atol=1e-10))

for lam in (0.5, 1.0, 2.0):
    rep = validate_geometry(build_mesh(dal, lam), 1e-8, 1e-9)
    print("lambda =", lam, " geometry pass:", rep.passed, " worst planarity %.1e" % rep.worst("planarity"))
