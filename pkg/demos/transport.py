"""
Transport of currents by a flow
===============================

A time-dependent velocity field generates flow maps ``Φ_{τ,t}``.  Currents
are pushed forward by them, and the rate of change of a transported current
is the dual Lie derivative ``ω ↦ T(L_w ω)``.
"""

import numpy as np

from defects.chains import Chain, Quadrature, affine_cell
from defects.currents import BoundaryCurrent, ChainCurrent, DualLieCurrent
from defects.currents import test_form_battery as battery
from defects.kinematics import Flow, current_rate_fd, inverse_velocity_check, pushforward_current, shear

flow = Flow(shear(multiplier=(1.0, 0.5)), (0.0, 1.0), dt=1e-2)
x = np.array([[0.3, -0.2, 0.1]])

# %%
# Flow maps compose and invert (times chosen off the RK4 step grid)
t2, t1, t0 = 0.9345, 0.51, 0.1
print("Φ(t2, t1)·Φ(t1, t0) − Φ(t2, t0):", np.abs(flow(t2, t1, flow(t1, t0, x)) - flow(t2, t0, x)).max())
print("Φ(t0, t2)·Φ(t2, t0) − id:       ", np.abs(flow(t0, t2, flow(t2, t0, x)) - x).max())
print("|w⁻¹ + w| at t = 0.5:           ", inverse_velocity_check(flow, 0.5, x))

# %%
# A tilted square current transported from t = 0.1 to τ = 0.6.  Boundary
# and pushforward commute; the two sides differ only by quadrature.
S = ChainCurrent(Chain([affine_cell([-0.5, -0.5, -0.2], [[1, 0, 0.3], [0, 1, 0.4]], quadrature=Quadrature(20, 8))]))
omega, alpha = battery(3, 2, count=1)[0], battery(3, 1, count=1)[0]
pushed = pushforward_current(flow, S, 0.6, 0.1)
print("\nS(ω) =", S.evaluate(omega), "  pushed S(ω) =", pushed.evaluate(omega))
print("∂(push S) − push(∂S):", BoundaryCurrent(pushed).evaluate(alpha)
      - pushforward_current(flow, BoundaryCurrent(S), 0.6, 0.1).evaluate(alpha))

# %%
# Rate of change at τ = t: finite differences against the dual Lie derivative
# and its Cartan decomposition w∧∂T + ∂(w∧T)
L = DualLieCurrent(S, flow.velocity.at(0.4))
print("\n  finite difference        dual Lie      decomposed")
for om in battery(3, 2, count=3):
    r = current_rate_fd(flow, S, om, 0.4)
    print(f"  {r.fd: .12f}  {r.exact: .12f}  {L.decomposed().evaluate(om): .12f}")
