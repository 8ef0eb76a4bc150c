"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Raised when a buoy/tether geometry is physically inadmissible."""


class ParseError(ValueError):
    """Raised when an input file (hydro table, climate CSV, design file) is malformed."""


class NumericalError(RuntimeError):
    """Raised when a numerical step fails, e.g. a singular system matrix."""


class ConfigError(ValueError):
    """Raised for invalid optimiser or campaign configuration."""


class BoundsError(ValueError):
    """Raised when a design vector leaves the admissible parameter box."""
