"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Bad parameters: malformed rational, out-of-range epsilon, wrong input length."""


class SimulationError(RuntimeError):
    """The simulation engine was driven outside its contract (e.g. slot overflow)."""


class ProtocolViolation(RuntimeError):
    """A channel or party produced something impossible under the channel model."""


class UsageError(ValueError):
    """An operation was applied to an object it does not support."""
