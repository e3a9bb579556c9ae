"""Exception types shared across the package."""


class LevyLabError(Exception):
    """Base class for all package errors."""


class DomainError(LevyLabError):
    """Evaluation requested outside a function's domain."""


class DivergenceError(LevyLabError):
    """An integral or transform diverges for the requested argument."""


class UnsupportedModel(LevyLabError):
    """The model is outside the catalog an operation supports."""


class TruncationError(LevyLabError):
    """A quadrature truncation point could not be certified."""


class StepError(LevyLabError):
    """A grid step is too coarse to meet the stated tolerance."""


class MethodUnavailable(LevyLabError):
    """The requested estimation method does not apply to this model."""


class NotApplicable(LevyLabError):
    """The identity or diagnostic is vacuous for this model."""


class ParseError(LevyLabError):
    """A scenario or model specification could not be parsed."""


class ValidationError(LevyLabError):
    """A parsed scenario violates an operation precondition.

    Carries the full list of violations so callers can report all of
    them at once rather than one per run.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
