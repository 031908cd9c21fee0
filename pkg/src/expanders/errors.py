"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class ExpanderError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(ExpanderError):
    """Invalid configuration or CLI arguments (exit code 2)."""


class DomainError(ExpanderError):
    """Scalar argument outside its mathematical domain (r <= 0, bad angle...)."""


class PoleProximity(DomainError):
    """A hyperspherical chart was evaluated too close to a coordinate pole."""


class ShapeMismatch(ExpanderError):
    """Field values do not match the owning patch grid."""


class DegenerateMetric(ExpanderError):
    """det(g) fell below the configured floor somewhere on a patch."""


class ImmersionFailure(ExpanderError):
    """A cone graph left the immersed regime (Z = sin(alpha) - (u/r) cos(alpha) <= 0)."""


class SingularMetric(ExpanderError):
    """Rank-one metric update is singular (non-positive block diagonal)."""


class InsufficientAnnuli(ExpanderError):
    """Fewer annuli than the required minimum contained usable nodes."""


class AxisSingularity(DomainError):
    """The profile reduction was evaluated at x <= 0 away from the axis start."""


class BlowUp(ExpanderError):
    """Profile integration left the admissible strip (theta exit or axis hit)."""


class ToleranceFailure(ExpanderError):
    """The adaptive integrator could not meet the local error tolerance."""


class NotConical(ExpanderError):
    """Asymptotic-angle estimators disagree; the end is not numerically conical."""


class NonConvexLandscape(ExpanderError):
    """Critical-angle scan found multiple local minima.

    The candidate minima (shoot parameter, angle) are attached as ``minima``.
    """

    def __init__(self, message: str, minima: list[tuple[float, float]]):
        super().__init__(message)
        self.minima = minima


class NotAnExpander(ExpanderError):
    """A verification gate found the expander residual above its threshold."""


class NonPositiveDenominator(ExpanderError):
    """H + epsilon is not positive everywhere, quotient identity undefined."""


class NotMeanConvex(ExpanderError):
    """H > 0 fails somewhere, so no Liouville certificate can be issued."""


class NoSplitRadius(ExpanderError):
    """No radius separates the region |A|^2 < lambda from the compact core."""
