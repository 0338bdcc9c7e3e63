"""Exceptions shared across the inference engines."""


class ImpossibleEvidenceError(Exception):
    """The observed evidence has probability zero under the model."""

    def __init__(self, message: str, variable: str | None = None) -> None:
        super().__init__(message)
        self.variable = variable


class ConvergenceError(Exception):
    """Relaxation failed to reach a fixpoint within its iteration budget.

    Must not happen on a valid singly-connected network; reaching this is an
    internal error."""
