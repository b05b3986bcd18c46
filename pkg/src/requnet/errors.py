"""Exception types shared across the package."""
from __future__ import annotations


class RequnetError(Exception):
    """Base class for all package errors."""


class ShapeError(RequnetError, ValueError):
    """Input or layer dimensions do not chain."""


class StructureError(RequnetError, ValueError):
    """Networks cannot be combined as requested."""


class ParseError(RequnetError, ValueError):
    """A serialized document is malformed.

    Parameters
    ----------
    message : str
    location : str, optional
        Where in the document the problem was found, e.g. ``"layers[2].bias"``.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ContractError(RequnetError, ValueError):
    """An input violates a compiler precondition (e.g. support shape)."""


class ConditioningError(RequnetError, ArithmeticError):
    """A change of basis or linear solve is too ill-conditioned to trust."""
