"""Exception types shared across the package."""


class NonFiniteFieldError(ArithmeticError):
    """A field contains NaN or Inf values."""


class StepUnderflowError(RuntimeError):
    """The adaptive controller would need a step below the minimum allowed."""


class ConfigError(ValueError):
    """A run configuration is malformed; the message names the offending key."""
