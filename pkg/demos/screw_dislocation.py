"""
Screw dislocation: circulation and the singular boundary current
================================================================

The layering form of a screw dislocation is ``φ = −(b/2π) dθ + dz``.  It is
closed away from the x3-axis, yet its circulation around the axis is ``−b``.
The boundary of the current ``T_φ`` is concentrated on the axis and is
computed here by excising a tube of radius ε and extrapolating ε → 0.
"""

import numpy as np

from defects.chains import Chain, Quadrature, circle, segment
from defects.currents import ChainCurrent, ExcisionSpec, singular_boundary_eval
from defects.currents import test_form_battery as battery
from defects.fields import book_form, screw_form

b = 2.5
phi = screw_form(b)

# %%
# Circulation around circles of several radii: always −b
for r in (0.3, 1.0, 2.0):
    c = Chain([circle([0.0, 0.0, 0.1], r, quadrature=Quadrature(20, 8))])
    print(f"r = {r:3.1f}   circulation = {c.integrate(phi): .12f}")

# %%
# Excision: ∂T_φ(α) evaluated on tubes of radius ε = 0.2·2^-k, then
# extrapolated.  The reference is the line current of the axis (oriented +z).
spec = ExcisionSpec(eps0=0.2, K=4)
axis = ChainCurrent(Chain([segment([0, 0, -3], [0, 0, 3], quadrature=Quadrature(40, 16))]))
print("\n   form   extrapolated      b·T_L(α)       ratio")
for k, alpha in enumerate(battery(3, 1, count=5)):
    res = singular_boundary_eval(phi, spec, alpha)
    ref = b * axis.evaluate(alpha)
    print(f"   {k:4d}  {res.value: .9f}  {ref: .9f}  {res.value / ref: .6f}")

# %%
# The ratio is −1: the boundary is −b·T_L with this orientation of the axis.
# The book form −(b/2π) dθ differs from φ by the exact form b·dz, so its
# boundary current is the same.
alpha = battery(3, 1, count=1)[0]
print("\nbook vs screw:", singular_boundary_eval(book_form(b), spec, alpha).value,
      singular_boundary_eval(phi, spec, alpha).value)

# %%
# The convergence series behind one extrapolation
res = singular_boundary_eval(phi, spec, alpha)
for eps, v in zip(res.radii, res.values):
    print(f"eps = {eps:.4f}   tube value = {v: .10f}")
print(f"extrapolated = {res.value: .10f}")
