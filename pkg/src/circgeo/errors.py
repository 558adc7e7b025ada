"""Exception hierarchy for circgeo."""


class CircGeoError(Exception):
    """Base class for all circgeo errors."""


class SingularMatrix(CircGeoError):
    """Circulant matrix has (numerically) zero determinant."""


class DegenerateMetric(CircGeoError):
    """The degeneracy factor D = (A-B)(A+2B) vanishes at the point."""


class ParseError(CircGeoError):
    """Malformed field-specification text.

    Carries the character offset where parsing failed.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownBuiltin(CircGeoError):
    """Field spec names a builtin field pair that does not exist."""


class ParallelismViolated(CircGeoError):
    """Reduced Christoffel forms requested where grad A != grad B . S."""


class StencilTooWide(CircGeoError):
    """A finite-difference stencil point falls outside the declared domain."""


class DependentOrbit(CircGeoError):
    """Seed vector x has x, qx, q^2x linearly dependent (cubic vanishes)."""


class IndefiniteMetric(CircGeoError):
    """Sectional curvature requested where the metric is not positive definite."""


class DegenerateSection(CircGeoError):
    """Spanning pair has (numerically) vanishing Gram determinant."""


class ConfigError(CircGeoError):
    """Invalid run configuration (CLI or config file)."""
