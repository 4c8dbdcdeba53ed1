"""Exception hierarchy shared by every module."""


class PdoError(Exception):
    """Base class for all errors raised by pdo_causal."""


class ArgumentError(PdoError, ValueError):
    """An argument is outside its documented domain."""


class ContractViolation(PdoError, ValueError):
    """An input breaks a precondition such as Hermiticity."""


class NormalizationError(ArgumentError):
    """A Pauli table does not have r_00 = 1."""


class InvalidCorrelationsError(ArgumentError):
    """A Pauli table is not a valid set of Pauli expectation values."""


class RankDeficientError(PdoError):
    """The closed-form recovery needs a full-rank marginal."""


class NoPseudoChannelError(ArgumentError):
    """No trace-preserving map in this direction reproduces the PDO."""


class DataError(PdoError, ValueError):
    """Sampled data is grossly inconsistent with any quantum model."""


class SolverError(PdoError):
    """The tau optimisation failed; ``best`` holds the incumbent result."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
