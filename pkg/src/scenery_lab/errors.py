"""Exception hierarchy shared across the library."""


class SceneryLabError(Exception):
    """Base class for all library errors."""


class QuadratureError(SceneryLabError):
    """Adaptive quadrature failed to meet the requested tolerance."""


class UnsupportedSkewError(SceneryLabError):
    """Sampling requested for a skewed stable law (only symmetric is supported)."""


class UnknownDistributionError(SceneryLabError):
    """Catalogue lookup with a name that is not a built-in."""


class NotLatticeError(SceneryLabError):
    """Lattice-only operation applied to a continuous distribution."""


class BudgetExceededError(SceneryLabError):
    """Exact enumeration would exceed the configured path budget."""


class TruncationMassError(SceneryLabError):
    """A finite truncation cannot reach the requested tail-mass tolerance."""


class BridgeRejectionError(SceneryLabError):
    """Rejection sampling of a bridge exhausted its attempt budget."""


class InvalidParameterError(SceneryLabError):
    """Parameter outside its documented domain (e.g. p0 >= 1)."""


class InsufficientPointsError(SceneryLabError):
    """Scaling fit invoked with fewer than three usable points."""
