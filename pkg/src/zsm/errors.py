from __future__ import annotations


class ZsmError(Exception):
    """Base class for library errors."""


class BudgetExceeded(ZsmError):
    """An exploration cap was hit; ``partial`` holds whatever was built before stopping."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class NotApplicable(ZsmError):
    pass


class NotEnabled(ZsmError):
    pass


class InvalidSequence(ZsmError):
    pass


class ShapeViolation(ZsmError):
    pass
