"""Exception hierarchy shared by every kdla module."""


class KdlaError(Exception):
    """Base class for all errors raised by kdla."""


class DimensionError(KdlaError, ValueError):
    """Array shapes do not agree with what an operation expects."""


class ConfigError(KdlaError, ValueError):
    """A configuration or recipe is invalid before any compute starts."""


class NumericalError(KdlaError, ArithmeticError):
    """An iterative numerical routine failed or produced non-finite values."""


class TrainingError(KdlaError, RuntimeError):
    """Training diverged. ``checkpoint`` holds the last good parameters, if any."""

    def __init__(self, message, checkpoint=None, epoch=None):
        super().__init__(message)
        self.checkpoint = checkpoint
        self.epoch = epoch
