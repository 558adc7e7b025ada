"""Numerical toolkit for the 3D Riemannian manifold with circulant metric."""

from .circulant import (
    IDENTITY,
    Q,
    S,
    CirculantMatrix,
    circ_apply,
    circ_det,
    circ_inverse,
    circ_mul,
)
from .connection import (
    ChristoffelSymbols,
    NablaQ,
    christoffel_closed,
    christoffel_general,
    nabla_q,
    parallel_defect,
    reduced_christoffel,
)
from .curvature import (
    CurvatureAtPoint,
    SectionReport,
    curvature_at,
    identity_31_residual,
    independence_cubic,
    sectional_curvature,
    sections_of,
    theorem3_check,
)
from .fields import (
    DomainStatus,
    FieldPair,
    MetricAtPoint,
    Polynomial,
    domain_check,
    field_eval,
    field_grad,
    metric_at,
    parse_field_spec,
)

__all__ = [
    "IDENTITY",
    "Q",
    "S",
    "CirculantMatrix",
    "circ_apply",
    "circ_det",
    "circ_inverse",
    "circ_mul",
    "ChristoffelSymbols",
    "NablaQ",
    "christoffel_closed",
    "christoffel_general",
    "nabla_q",
    "parallel_defect",
    "reduced_christoffel",
    "CurvatureAtPoint",
    "SectionReport",
    "curvature_at",
    "identity_31_residual",
    "independence_cubic",
    "sectional_curvature",
    "sections_of",
    "theorem3_check",
    "DomainStatus",
    "FieldPair",
    "MetricAtPoint",
    "Polynomial",
    "domain_check",
    "field_eval",
    "field_grad",
    "metric_at",
    "parse_field_spec",
]

__version__ = "0.1.0"
