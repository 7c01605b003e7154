from django.core.exceptions import ValidationError


class UnreadablePhaseError(ValidationError):
    """The two fringe patterns of the alphabet cannot be told apart."""


class BudgetExceededError(ValidationError):
    """The readout never reached the requested confidence within the particle budget."""

    def __init__(self, message, best_accuracy: float = 0.0, trace=None, code=None):
        super().__init__(message, code=code)

        self.best_accuracy = best_accuracy
        self.trace = trace or []
