"""Exception types shared across the library.

Each class corresponds to one failure mode surfaced at the API boundary;
plain ValueError is used for generic invalid arguments.
"""


class CharflowError(Exception):
    """Base class for library-specific failures."""


class IllConditionedForm(CharflowError):
    """Trace-form Gram matrix too ill-conditioned to solve against."""


class NotProximal(CharflowError):
    """Eigenvalue gap below threshold; simple root length undefined."""


class NotHyperbolic(CharflowError):
    """|trace| < 2: element is not hyperbolic, no translation length."""


class UnsupportedDecomposition(CharflowError):
    """Pants combinatorics not among the shipped builder patterns."""


class ParseError(CharflowError):
    """Scenario file violates the schema. Carries the offending field path."""

    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)


class ScenarioInvalid(CharflowError):
    """Scenario parsed but an invariant failed. Carries the invariant name."""

    def __init__(self, invariant, message=""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}" if message else invariant)


class IncompleteAtlas(CharflowError):
    """Intersection table has no entry for a requested curve pair."""


class CalibrationIllConditioned(CharflowError):
    """All Darboux denominators below threshold; ratio undefined."""


class NumericalFailure(CharflowError):
    """Non-finite value encountered in a numerical routine."""


class IntegrationFailure(CharflowError):
    """ODE integration aborted; carries the last good state."""

    def __init__(self, message, last_time=None, last_state=None):
        self.last_time = last_time
        self.last_state = last_state
        super().__init__(message)


class DegenerateProbe(CharflowError):
    """Probe curve does not cross the support of the flow."""
