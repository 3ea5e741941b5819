"""Exception types raised by polycurv."""


class PolycurvError(Exception):
    """Base class for all library errors."""


class ArgumentError(PolycurvError, ValueError):
    """Bad argument (non-monotone partition, odd lantern parity, ...)."""


class InvalidCurveError(PolycurvError, ValueError):
    pass


class InvalidMeshError(PolycurvError, ValueError):
    """Degenerate triangle, inconsistent orientation, or bad index."""


class TopologyError(InvalidMeshError):
    """Non-manifold edge or vertex link."""


class BoundaryError(PolycurvError, ValueError):
    """Curvature quantity requested on a boundary edge or vertex."""


class OffParseError(PolycurvError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class HemisphereError(PolycurvError, ValueError):
    """A normal lies outside the open upper hemisphere required for gnomonic projection."""


class GeodesicError(PolycurvError, ValueError):
    """Consecutive antipodal points: the connecting geodesic is undefined."""


class PreconditionError(PolycurvError, ValueError):
    pass


class ResolutionError(PolycurvError, ValueError):
    """Mollifier radius too small for the grid spacing."""


class ResourceError(PolycurvError, ValueError):
    """Requested construction would be too large."""
