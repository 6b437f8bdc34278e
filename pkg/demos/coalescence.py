"""
Smooth structure forms coalescing into a line defect
====================================================

Mollifying the current of an axis segment with bump kernels of radius ε
gives smooth forms ``φ_ε``.  Read as an evolution in ``t = 1 − ε``, the
smooth currents converge weakly to the singular one, and their boundaries
converge to the pair of point defects at the segment ends.
"""

from defects.chains import Chain, Quadrature, segment
from defects.currents import BoundaryCurrent, ChainCurrent
from defects.currents import test_form_battery as battery
from defects.fields import Box
from defects.regularize import MollifierSpec, boundary_commutation, coalescence_schedule

spec = MollifierSpec(3, eps0=1.0, K=6, box=Box([-3.5] * 3, [3.5] * 3))
axis = Chain([segment([0, 0, -2], [0, 0, 2], quadrature=Quadrature(20, 8))])
short = Chain([segment([0, 0, -0.5], [0, 0, 0.5], quadrature=Quadrature(20, 8))])

# %%
# Weak distance max_ω |T_t(ω) − T(ω)| over a battery of test 1-forms
print("    t       eps     weak distance")
for snap in coalescence_schedule(axis, spec, battery(3, 1, count=6)):
    print(f"{snap.t:7.4f}  {snap.eps:7.4f}   {snap.distance:.3e}")

# %%
# Mollification commutes with the boundary: ∂T_ε against the mollified
# point currents at the segment ends, and both against the limit ∂T.
psi = battery(3, 0, count=1)[0]
limit = BoundaryCurrent(ChainCurrent(short)).evaluate(psi)
print("\n   eps     ∂T_eps(ψ)      mollified ∂c   limit ∂T(ψ)")
for eps in spec.schedule[:5]:
    bc = boundary_commutation(short, spec, eps, psi)
    print(f"{eps:7.4f}  {bc.boundary: .8f}  {bc.mollified_boundary: .8f}  {limit: .8f}")
