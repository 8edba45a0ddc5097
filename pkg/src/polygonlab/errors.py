"""Exception hierarchy for polygonlab.

Every error raised by the library derives from PolygonLabError so callers
(and the CLI) can distinguish input problems from genuine bugs.
"""


class PolygonLabError(Exception):
    """Base class for all polygonlab errors."""


# ---- polygon construction / conversion ----

class TooFewVertices(PolygonLabError):
    pass


class DuplicateConsecutiveVertex(PolygonLabError):
    pass


class DegenerateZeroArea(PolygonLabError):
    pass


class BarycenterOutside(PolygonLabError):
    """Central angles at the vertex barycenter do not sum to a full turn."""


class ZeroRadius(PolygonLabError):
    pass


class InvalidManifoldPoint(PolygonLabError):
    pass


class NonpositiveArea(PolygonLabError):
    pass


# ---- manifold machinery ----

class SamplingExhausted(PolygonLabError):
    pass


class RetractionFailed(PolygonLabError):
    pass


# ---- spectral / differentiation ----

class DimensionMismatch(PolygonLabError):
    pass


class StepTooSmall(PolygonLabError):
    """Finite-difference cancellation detected by a Richardson cross-check."""


class MismatchExceedsTolerance(PolygonLabError):
    pass


class NonpositiveSigma(PolygonLabError):
    pass


# ---- inequality lab ----

class NotOnManifold(PolygonLabError):
    pass


class DegenerateDirection(PolygonLabError):
    pass


class NotTangentDirection(PolygonLabError):
    pass


# ---- convexifier ----

class NotSimple(PolygonLabError):
    pass


class ReflectionCreatesSelfIntersection(PolygonLabError):
    pass


class FlipBudgetExhausted(PolygonLabError):
    pass
