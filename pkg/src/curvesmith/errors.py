"""Exception hierarchy shared by every curvesmith module."""


class CurvesmithError(Exception):
    """Base class for all library errors."""


class PreconditionError(CurvesmithError, ValueError):
    """An input violates an operation's stated precondition."""


class SearchExhausted(CurvesmithError):
    """A bounded search ran out of candidates or trials."""


class NonResidue(PreconditionError):
    pass


class SingularLift(PreconditionError):
    pass


class NotCoprime(PreconditionError):
    pass


class NotDiscriminant(PreconditionError):
    pass


class NotNonresidue(PreconditionError):
    pass


class CurveMismatch(PreconditionError):
    pass


class NotDivisible(PreconditionError):
    pass


class TooLarge(PreconditionError):
    pass


class TooLargeM(PreconditionError):
    pass


class NotSplit(CurvesmithError):
    """A polynomial expected to split into distinct linear factors does not."""


class PrecisionExhausted(CurvesmithError):
    """Rounding of a class polynomial failed after every precision retry."""


class TrialsExhausted(SearchExhausted):
    def __init__(self, msg, trials=None):
        super().__init__(msg)
        self.trials = trials


class NoTraceInInterval(SearchExhausted):
    pass


class SubgroupVerificationFailed(CurvesmithError):
    """A constructed curve does not contain the requested subgroup."""
