"""Exception types shared across the package."""


class QspsimError(Exception):
    """Base class for all library errors."""


class DomainError(QspsimError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ContractError(QspsimError, ValueError):
    """An input violates a structural precondition (hermiticity, parity, shape)."""


class CapacityError(QspsimError):
    """A requested construction exceeds a configured size limit."""


class ParseError(QspsimError, ValueError):
    """Malformed text input (Pauli files, phase files, polynomial files, configs)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AccuracyError(QspsimError):
    """A numerical procedure failed its own accuracy self-check."""


class DegenerateOutcomeError(QspsimError):
    """Post-selection onto a subspace that the state does not reach."""


class ConfigError(QspsimError, ValueError):
    """Invalid or inconsistent experiment configuration."""


class SynthesisError(QspsimError):
    """Phase synthesis did not reach the requested tolerance."""
