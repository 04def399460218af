"""
Splitting a loop into minus and plus factors
=============================================

A product of moving-frame factors is a Laurent polynomial loop.  We split
it both ways and look at the residual and at the factors themselves.
"""
import numpy as np

from dps.birkhoff import split_minus_plus, split_plus_minus
from dps.hirota import u_loop, v_loop
from dps.loops import LaurentLoop, check_twisted, multiply

rng = np.random.default_rng(0)

# three U factors and two V factors, p = q = 1
phi = LaurentLoop.identity()
for f in (u_loop, v_loop, u_loop, u_loop, v_loop):
    u, u1 = rng.uniform(-np.pi, np.pi, 2)
    phi = multiply(phi, f(u, u1, 1.0))
print("band of phi:", phi.lo, "..", phi.hi, " twisted:", check_twisted(phi))

mp = split_minus_plus(phi)
pm = split_plus_minus(phi)
print("minus-plus: K =", mp.K, " residual = %.2e" % mp.residual)
print("plus-minus: K =", pm.K, " residual = %.2e" % pm.residual)

# the plus factor of a polynomial loop is a polynomial of the same top degree
print("plus factor degrees:", mp.plus.lo, "..", mp.plus.hi)

# the minus factor is normalized at infinity
print("minus(inf) =\n", np.round(mp.minus[0], 12))
