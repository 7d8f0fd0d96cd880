"""Exception types raised across the package.

Every failure mode that callers are expected to handle gets its own class;
all inherit from :class:`FhleError` so "anything this library raises" is one
``except`` clause away.
"""


class FhleError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameter(FhleError):
    """A problem parameter tuple (n, s, a, p) or a config value is outside
    its admissible range."""


class NonPositiveArgument(FhleError):
    """log-Gamma requested at x <= 0."""


class OutOfRange(FhleError):
    """Scalar argument outside the range an operation supports."""


class PoleOrNegativeArgument(FhleError):
    """A Gamma factor was requested at a pole or a nonpositive argument."""


class DimensionTooSmall(FhleError):
    """Operation requires n > 2s."""


class NotSupercritical(FhleError):
    """Operation requires p > p_S(n, a)."""


class SingularEvaluation(FhleError):
    """Kernel evaluated too close to the diagonal c = 1."""


class NonConvergent(FhleError):
    """Integrand exponents make the integral non-convergent."""


class UnsupportedOrder(FhleError):
    """Operation only defined for the singular-integral range 0 < s < 1."""


class TailUnspecified(FhleError):
    """Radial data has no decay model and the truncation error estimate
    exceeds tolerance."""


class GridTooCoarse(FhleError):
    """Grid has too few nodes for the requested finite-difference stencil."""


class ExtrapolationUnstable(FhleError):
    """Successive boundary extrapolants disagree by more than 10x the
    grid tolerance."""


class UnsupportedDimension(FhleError):
    """Spectral oracle only implemented for n in {1, 3}."""


class AliasingDetected(FhleError):
    """Spectral tail carries more than the allowed fraction of total mass."""


class DomainExceeded(FhleError):
    """Rescaling would read the field outside its sampled or modeled
    domain."""


class DimensionConditionViolated(FhleError):
    """Higher-order energy requested although the dimension inequality
    fails; the message reports both sides."""


class NonIntegrable(FhleError):
    """Cutoff decay exponent m <= n/2 makes the far field non-integrable."""


class ExponentZero(FhleError):
    """Scaling-law exponent vanishes (logarithmic growth case)."""
