"""
Interfaces: director sources concentrated on a hyperplane
=========================================================

A piecewise-constant (n−1)-form that jumps across the hyperplane
``P = {x^{n−1} = 0}`` has a boundary current concentrated on P.  Only the
jump of the dx^0∧…∧dx^{n−2} component matters.
"""

import numpy as np

from defects.chains import Chain, Quadrature, affine_cell, box
from defects.currents import BoundaryCurrent, ChainCurrent, ContractFormCurrent, FormCurrent
from defects.currents import test_form_battery as battery
from defects.fields import constant_form

L, q = 2.0, Quadrature(16, 4)


def halves(n):
    lower = box([-L] * n, [L] * (n - 1) + [0.0], quadrature=q)
    upper = box([-L] * (n - 1) + [0.0], [L] * n, quadrature=q)
    return lower, upper


def plane_current(n):
    """α ↦ ∫_P α, P oriented by dx^0∧…∧dx^{n−2}."""
    P = ChainCurrent(Chain([affine_cell([-L] * (n - 1) + [0.0], np.eye(n)[: n - 1] * 2 * L, quadrature=q)]))
    return ContractFormCurrent(P, constant_form(n, n - 1, {tuple(range(n - 1)): 1.0}))


# %%
# Example 1: φ = dx^0∧…∧dx^{n−2} above P and a·φ below it.
for n in (2, 3):
    lower, upper = halves(n)
    top = tuple(range(n - 1))
    TP = plane_current(n)
    for a in (0.0, 0.5, 2.0):
        T = FormCurrent([(constant_form(n, n - 1, {top: 1.0}), upper), (constant_form(n, n - 1, {top: a}), lower)])
        alpha = battery(n, 0, count=1)[0]
        print(f"n={n} a={a:3.1f}   boundary = {BoundaryCurrent(T).evaluate(alpha): .10f}"
              f"   (a-1)·T_P = {(a - 1) * TP.evaluate(alpha): .10f}")

# %%
# Example 2: two uniform 2-forms in R^3 sharing the dx^0∧dx^1 component.
# Their other components only contribute total derivatives, so the boundary
# vanishes; finer boxes push the quadrature residual down.
q = Quadrature(20, 6)
lower, upper = halves(3)
phi1 = constant_form(3, 2, {(0, 1): 0.7, (0, 2): 0.3})
phi2 = constant_form(3, 2, {(0, 1): 0.7, (1, 2): -0.9})
T = FormCurrent([(phi2, upper), (phi1, lower)])
print("\nshared top component, boundary:", BoundaryCurrent(T).evaluate(battery(3, 0, count=1)[0]))
