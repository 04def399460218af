"""
A curve flowing across the surface
==================================

The row ``m = 0`` of a surface is a discrete curve of constant torsion.
Its Frenet frame moves by L along the curve and by M in time; the gauge
G turns (L, M) into the surface's (U, V) and the swept curves trace out
the surface itself.
"""
import numpy as np

from dps.curve_flow import congruence_to_mesh, evolve_curve, gauge_check, gauge_G, initial_curve
from dps.hirota import AxisData, direct_frame, evolve_u
from dps.lattice import Rect
from dps.sym import build_mesh, export_polylines

rng = np.random.default_rng(2)
rect = Rect(0, 9, 0, 6)
ax = AxisData.random(rng, rect, p=0.8, q=0.8, scale=1.0)
u = evolve_u(ax, rect)

lam = 1.0
sites = [(n, m) for n in range(6) for m in range(4)]
print("gauge identity:", gauge_check(u, ax.p, ax.q, lam, sites))

# a = p and b = 4/q
b = lambda m: 4.0 / ax.q(m)
c0 = initial_curve(u, ax.p, lam, 8, Phi0=np.linalg.inv(gauge_G(u, 0, 0)))
curves, gap = evolve_curve(c0, u, ax.p, b, lam, 5)
print("tan recursion vs angle field: %.1e" % gap)

res, R, t = congruence_to_mesh(curves, build_mesh(direct_frame(u, ax.p, ax.q), lam), lam)
print("congruence to the surface: %.1e" % res)

export_polylines([c.gamma for c in curves], "flow.obj", header="curve flow, lambda = 1")
print("wrote flow.obj")
