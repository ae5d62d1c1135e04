class LocaleMergeError(ValueError):
    """Base class for every error raised by the merger and harness packages."""


class MalformedUrl(LocaleMergeError):
    pass


class BudgetTooSmall(LocaleMergeError):
    pass


class InvalidWeight(LocaleMergeError):
    pass


class DomainError(LocaleMergeError):
    """Raised when a calculator argument lies outside its mathematical domain."""


class MissingField(LocaleMergeError):
    """A prompt template names a brief field the stage projection does not carry."""

    def __init__(self, field: str, available: set[str]):
        self.field = field
        self.available = available
        super().__init__(
            f"Template references '{field}', which is not part of this projection. "
            f"Available fields: {sorted(available)}"
        )


class UndefinedMetric(LocaleMergeError):
    pass


class FixtureError(LocaleMergeError):
    pass
