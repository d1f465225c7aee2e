"""Exception hierarchy shared by all modules."""


class SigmaForgeError(Exception):
    """Base class for every error raised by sigma_forge."""


class DimensionMismatchError(SigmaForgeError, ValueError):
    """Operands disagree on variable count, cutoff or tensor shape."""


class DomainError(SigmaForgeError, ValueError):
    """Input lies outside the domain where the operation is defined."""


class PreconditionError(SigmaForgeError, ValueError):
    """A documented precondition of an operation does not hold."""


class ConfigError(SigmaForgeError, ValueError):
    """A run or target configuration failed validation."""
