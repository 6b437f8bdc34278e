"""Scalar fields, maps, differential forms and multivector fields."""

from .domain import Box, DomainError
from .forms import (
    CoefficientForm,
    DifferentialForm,
    MultivectorField,
    PulledBackForm,
    SumForm,
    VectorField,
    WedgeForm,
    constant_form,
    contract_field,
    eval_form,
    lie_derivative,
    pullback,
    pullback_explicit,
    random_test_form,
    test_form,
    zero_form,
)
from .library import (
    R_MIN,
    FrobeniusResult,
    book_form,
    cylindrical_volume_form,
    director_field,
    director_line_form,
    dr_form,
    dtheta_form,
    dz_form,
    euclidean_volume_form,
    frobenius_check,
    radius_field,
    screw_form,
)
from .maps import (
    AffineMap,
    ComposedMap,
    FieldMap,
    MapBetweenCharts,
    NumericMap,
    cylindrical_map,
    identity_map,
    jacobian_fd,
)
from .scalar import (
    BumpPolynomial,
    Composed,
    Constant,
    FunctionField,
    InverseRadiusPower,
    Polynomial,
    Product,
    Reciprocal,
    ScalarField,
    SecondDerivativeUnavailable,
    Sinusoid,
    Sum,
)
