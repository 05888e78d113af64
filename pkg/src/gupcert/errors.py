"""Exception types shared across the library."""


class GupcertError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(GupcertError):
    """A scalar parameter lies outside its admissible range."""


class DegenerateStateError(GupcertError):
    """A state has zero norm or an empty support."""


class DomainError(GupcertError):
    """An argument lies outside the domain of the requested map."""


class ResolutionError(GupcertError):
    """A grid could not be extended or refined to the target accuracy within budget."""


class ContractError(GupcertError):
    """An input violates a documented precondition, e.g. a non-normalized density."""


class MomentDivergenceError(GupcertError):
    """A moment integral diverges on a heavy-tailed density.

    Carries the partial grid value and the fitted tail exponent so callers can
    downgrade a check to a not-applicable verdict instead of aborting.
    """

    def __init__(self, message, partial=None, tail_exponent=None):
        super().__init__(message)
        self.partial = partial
        self.tail_exponent = tail_exponent


class NormDivergenceError(GupcertError):
    """An alpha-norm integral diverges on a heavy-tailed density."""

    def __init__(self, message, tail_exponent=None):
        super().__init__(message)
        self.tail_exponent = tail_exponent


class ConfigError(GupcertError):
    """Unusable run configuration; maps to CLI exit code 2."""
