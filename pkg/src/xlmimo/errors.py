"""Exception types shared across the package."""


class XlMimoError(Exception):
    """Base class for all xlmimo errors."""


class ConfigurationError(XlMimoError, ValueError):
    """Invalid or inconsistent configuration values."""


class GeometryInfeasibleError(XlMimoError, RuntimeError):
    """Rejection sampling could not satisfy the geometric constraints."""


class UnsupportedTopologyError(XlMimoError, ValueError):
    """Block assembly requested for a topology other than S=3, L=2."""


class ModelError(XlMimoError, ValueError):
    """Statistical model violated (e.g. covariance not positive semi-definite)."""


class NotHpdError(XlMimoError, ValueError):
    """Matrix expected to be Hermitian positive definite is not."""


class SplittingError(XlMimoError, ValueError):
    """Matrix splitting unusable (zero diagonal entry)."""


class DegenerateChannelError(XlMimoError, ValueError):
    """Channel block carries no energy; power control undefined."""


class AssemblyError(XlMimoError, ValueError):
    """Block shapes inconsistent during matrix assembly."""
