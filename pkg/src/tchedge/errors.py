"""Exception hierarchy.

Input problems derive from :class:`ValidationError` (CLI exit code 2),
numerical/solver problems from :class:`SolverError` (exit code 3).
"""


class TcHedgeError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1


class ValidationError(TcHedgeError, ValueError):
    exit_code = 2


class SolverError(TcHedgeError, RuntimeError):
    exit_code = 3


# tree
class OrphanNode(ValidationError):
    pass


class LeafBeforeHorizon(ValidationError):
    pass


class ProbabilityNotNormalized(ValidationError):
    pass


class NonPositiveProbability(ValidationError):
    pass


class UnknownNode(ValidationError, KeyError):
    def __str__(self):  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


class MissingNode(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


# cones / markets
class NonPositivePrice(ValidationError):
    pass


class NegativeCost(ValidationError):
    pass


class CycleArbitrage(ValidationError):
    """A round trip through several assets returns more than it costs."""


class NotMarketCone(ValidationError):
    pass


# two-asset representations
class NotTwoAsset(ValidationError):
    pass


class ZeroFirstComponent(ValidationError):
    pass


class OutsideDualCone(ValidationError):
    pass


class NotInQ(ValidationError):
    pass


class NotApproximateMartingaleMeasure(ValidationError):
    pass


# io
class SchemaError(ValidationError):
    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"


# solver side
class IterationLimit(SolverError):
    pass


class NumericalBreakdown(SolverError):
    pass


class UnboundedBelow(SolverError):
    pass


class InfeasibleClaim(SolverError):
    pass


class ArbitrageDetected(SolverError):
    """Raised when a price LP is unbounded (or its dual infeasible)."""


class EnumerationCapExceeded(SolverError):
    pass
