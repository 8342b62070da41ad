"""Exception hierarchy shared by all modules."""


class MapRenewalError(Exception):
    """Base class for every error raised by this package."""


class ModelValidationError(MapRenewalError, ValueError):
    """A model or model-spec file violates a type invariant."""


class NotErgodic(MapRenewalError):
    """The transition matrix has no strictly positive power."""


class UnknownModel(MapRenewalError, KeyError):
    pass


class NoConvergence(MapRenewalError):
    """An iterative eigenvalue solver hit its iteration cap."""


class SingularResolvent(MapRenewalError):
    """``z - M`` is numerically singular (``z`` too close to the spectrum)."""


class GapTooSmall(MapRenewalError):
    pass


class ProjectionFailed(MapRenewalError):
    """The contour projector is not a rank-one idempotent.

    Usually means ``t`` lies outside the perturbation neighbourhood.
    """


class NotCentered(MapRenewalError):
    pass


class DimensionTooSmall(MapRenewalError, ValueError):
    pass


class SigmaNotPD(MapRenewalError, ValueError):
    pass


class ZeroShift(MapRenewalError, ValueError):
    pass


class TailNotNegligible(MapRenewalError):
    """The truncated renewal series leaves an uncontrolled tail."""


class QuadratureBudgetExceeded(MapRenewalError):
    pass


class OutOfTableRange(MapRenewalError):
    pass
