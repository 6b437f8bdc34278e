"""Defects in ordered media as differential forms and currents.

Subpackages and modules:

``defects.algebra``
    Multi-indices, alternating tensors, wedge, contractions, decomposability.
``defects.fields``
    Scalar fields, maps, differential forms, vector fields, named forms.
``defects.chains``
    Parametrized cells, chains, boundaries and quadrature.
``defects.currents``
    Currents, boundaries, pushforwards and excision limits.
``defects.kinematics``
    Flows of time-dependent velocity fields and transport rates.
``defects.regularize``
    Mollified chain currents and their weak convergence.
``defects.scenario`` / ``defects.cli``
    Scenario configs, reports and the ``defects`` command.
"""

from . import algebra, chains, currents, fields, kinematics, regularize, scenario

__version__ = "0.1.0"

__all__ = ["algebra", "chains", "currents", "fields", "kinematics", "regularize", "scenario", "__version__"]
