"""Exception hierarchy shared across the pipeline."""


class DedupeError(Exception):
    """Base class for all pipeline errors."""


class SchemaError(DedupeError, ValueError):
    """Input file does not match the expected column layout."""


class RowError(DedupeError, ValueError):
    """A single data row could not be parsed."""

    def __init__(self, row: int, message: str) -> None:
        super().__init__(f"row {row}: {message}")
        self.row = row


class ValidationError(DedupeError, ValueError):
    pass


class ConfigError(DedupeError, ValueError):
    pass


class ShapeError(DedupeError, ValueError):
    pass


class ProviderError(DedupeError):
    """Embedding provider failed; ``retryable`` tells the caller whether a retry may help."""

    def __init__(self, message: str, retryable: bool = False) -> None:
        super().__init__(message)
        self.retryable = retryable


class ProtocolError(ProviderError):
    """Remote service answered, but the payload broke the wire contract."""

    def __init__(self, message: str) -> None:
        super().__init__(message, retryable=False)
