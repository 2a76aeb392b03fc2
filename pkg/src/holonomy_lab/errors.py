"""Exception types raised by the library.

All subclass ValueError so callers that do not care about the distinction can
catch the built-in type.
"""


class DimensionMismatchError(ValueError):
    """Operands live in different Hilbert-space dimensions."""


class NonHermitianError(ValueError):
    """A matrix required to be Hermitian is not, within tolerance."""


class NormalizationDriftError(ValueError):
    """A frame vector's norm drifts in time, making its connection ill-defined."""


class NotCyclicError(ValueError):
    """Trajectory endpoints do not lie on the same ray within tolerance."""


class OrthogonalEndpointsError(ValueError):
    """Endpoint overlap too small to define a Pancharatnam phase."""


class ConfigError(ValueError):
    """Invalid run configuration."""
