"""
Amsler surface
==============

Constant potentials with diagonal initial conditions.  The two axes are
straight lines through the origin meeting at the angle ``ell - s``.
"""
import numpy as np

from dps.surfaces import AmslerConfig, build_amsler, check_amsler_constraints
from dps.sym import export_obj

cfg = AmslerConfig(q=1.0, s=0.0, ell=np.pi / 4, size=8)
surf = build_amsler(cfg)

mesh = surf.mesh(1.0)
print("f(1, 0) =", np.round(mesh[(1, 0)], 12))
print("f(0, 1) =", np.round(mesh[(0, 1)], 12))

rep = check_amsler_constraints(surf)
for key in ("lines", "lambda_fit", "constraint", "dPIII", "reflection", "u_symmetry"):
    print("%-11s %.1e" % (key, rep[key]))

# u is symmetric and constant 2 ell on the axes
print(np.round(surf.u.values[:4, :4], 6))

export_obj(mesh, "amsler.obj")
print("wrote amsler.obj")
