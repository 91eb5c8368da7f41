"""Exception types shared across the package."""


class GridfairError(Exception):
    """Base class for all gridfair errors."""


class LayoutError(GridfairError):
    """Invalid grid geometry or column-reduction request."""


class ShapeError(GridfairError):
    """Mismatched vector/matrix dimensions or group schemas."""


class MetricError(GridfairError):
    """Metric cannot be evaluated: undefined exposure, bad distance or
    target specification, or an empty aggregate."""


class ParseError(GridfairError):
    """Malformed input file. Carries the path and 1-based line number."""

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class ConfigError(GridfairError):
    """Invalid configuration or command-line usage."""
