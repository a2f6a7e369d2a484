"""Exception types shared across the toolkit.

Every error raised on purpose derives from :class:`CascadeTracerError`, so
callers can catch the library's failures without swallowing programming
errors.  Verdict-style failures (census mismatch, conservation violation)
are exceptions too: they mark a claim that did not hold, which callers such
as the CLI translate into a dedicated exit code.
"""


class CascadeTracerError(Exception):
    """Base class for all toolkit errors."""


class NumericalOverflow(CascadeTracerError):
    """Map or Jacobian evaluation produced a non-finite value."""


class TrajectoryEscape(CascadeTracerError):
    """ODE state left the configured escape radius during integration."""


class UnknownMap(CascadeTracerError):
    """Requested name is not in the built-in map registry."""


class BadParameter(CascadeTracerError):
    """Invalid argument, override, or configuration value."""


class NotAnOrbit(CascadeTracerError):
    """Point list does not chain under the map within tolerance."""


class NoConvergence(CascadeTracerError):
    """Newton iteration failed to converge."""


class SingularSystem(CascadeTracerError):
    """Newton matrix is singular: a monodromy eigenvalue sits at +1."""


class IncompleteEnumeration(CascadeTracerError):
    """Symbolic seeding failed for some words; never silently dropped."""

    def __init__(self, message, failed_words=()):
        super().__init__(message)
        self.failed_words = list(failed_words)


class NotNonflip(CascadeTracerError):
    """Continuation seed is a flip orbit."""


class BadSeed(CascadeTracerError):
    """Continuation seed did not converge under Newton."""


class AmbiguousEvent(CascadeTracerError):
    """Two test functions changed sign in one bracket; step must shrink."""


class BranchSwitchFailure(CascadeTracerError):
    """Both sides of a period doubling failed to yield the doubled orbit."""


class ConservationViolation(CascadeTracerError):
    """Orbit-index bookkeeping failed at a bifurcation event."""


class CensusMismatch(CascadeTracerError):
    """Numeric orbit count disagrees with the exact symbolic count."""


class InvalidBoundary(CascadeTracerError):
    """A non-hyperbolic orbit sits on a census boundary slice."""


class TooLarge(CascadeTracerError):
    """Exhaustive enumeration guard exceeded."""


class InternalError(CascadeTracerError):
    """An exactness assertion failed; indicates a broken invariant."""


class NoPrediction(CascadeTracerError):
    """Entry and exit counts are equal: the census predicts nothing."""
