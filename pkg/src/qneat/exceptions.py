"""Exception hierarchy shared by every module."""


class QNEATError(Exception):
    """Base class for all errors raised by this package."""

    category = "error"


class InvalidArgumentError(QNEATError, ValueError):
    category = "config"


class UnsupportedSizeError(QNEATError, ValueError):
    category = "unsupported-size"


class NoNeutralAxisError(QNEATError, ValueError):
    """Every Pauli axis occurs in at least one Hamiltonian term."""

    category = "config"


class EvaluationError(QNEATError, RuntimeError):
    """An offspring evaluation failed; carries the offspring index."""

    category = "evaluation"

    def __init__(self, message, offspring_index=None):
        super().__init__(message)
        self.offspring_index = offspring_index
