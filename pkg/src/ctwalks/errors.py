"""Exception hierarchy shared by all ctwalks modules."""


class WalkError(Exception):
    """Base class for all ctwalks errors."""


class DomainError(WalkError, ValueError):
    """An argument is outside the domain an operation is defined on."""


class CapacityError(WalkError):
    """An input exceeds the desk-scale size budget."""


class PathOverflowError(CapacityError):
    """Shortest-path enumeration would exceed the configured limit."""

    def __init__(self, count: int, limit: int):
        super().__init__(
            f"{count} shortest paths exceed the enumeration limit {limit}; "
            "the exact count is still available without enumeration"
        )
        self.count = count
        self.limit = limit


class AccuracyError(WalkError):
    """A numerical routine could not reach the requested tolerance.

    Carries the accuracy that was actually achieved.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved {achieved:.3e})")
        self.achieved = achieved


class InputError(WalkError):
    """Malformed configuration or data file; names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
