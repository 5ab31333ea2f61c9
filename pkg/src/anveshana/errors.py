"""Exception types shared across the engine.

Class names double as the stable error codes returned by the HTTP API
(`{"error": code, "message": ...}`).
"""


class AnveshanaError(Exception):
    """Base class for all engine errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class UnreadableInput(AnveshanaError):
    """Input stream cannot be decoded or its header is unusable; nothing was parsed."""


class EmptyCorpus(AnveshanaError):
    """Operation requires at least one challenge."""


class UndefinedForSingleLabelDimension(AnveshanaError):
    """Concentration is undefined when the dimension has fewer than two possible labels."""


class DegenerateTable(AnveshanaError):
    """Contingency table has fewer than two rows or columns after zero-margin removal."""


class DimensionMismatch(AnveshanaError):
    """Vectors of different dimensions cannot be compared."""


class ProviderFailure(AnveshanaError):
    """An external provider (embedding or generation) failed after retry."""

    def __init__(self, message: str, completed: int = 0):
        super().__init__(message)
        self.completed = completed  # units of work finished before the failure


class OutOfOrderEvent(AnveshanaError):
    """Event timestamp precedes an already-applied event for the same learner."""


class UnknownCategory(AnveshanaError):
    """Category label does not exist in the corpus."""


class UnknownChallenge(AnveshanaError):
    """Challenge id does not exist in the corpus."""
