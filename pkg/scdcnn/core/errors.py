"""
core/errors.py — Exception hierarchy shared by every layer.

The CLI maps these onto exit codes and the HTTP layer onto status codes;
nothing below the harness knows about either.
"""
from __future__ import annotations

from typing import Optional


class ScdcnnError(Exception):
    """Base class for all simulator errors."""


class ScRangeError(ScdcnnError, ValueError):
    """A value lies outside the range its encoding (or precision) can hold."""


class ContractError(ScdcnnError, ValueError):
    """Operands violate a block's preconditions (length, encoding, arity)."""


class ParseError(ScdcnnError, ValueError):
    """A binary payload could not be decoded; ``offset`` points at the bad byte."""

    def __init__(self, message: str, offset: int, path: Optional[str] = None) -> None:
        self.offset = offset
        self.path = path
        where = f"{path}: " if path else ""
        super().__init__(f"{where}parse error at byte offset {offset}: {message}")


class FormatError(ScdcnnError, ValueError):
    """A payload parsed cleanly but its contents disagree with each other."""


class ShapeMismatchError(ScdcnnError, ValueError):
    def __init__(self, layer: int, what: str, expected: object, actual: object) -> None:
        self.layer = layer
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"layer {layer}: {what} mismatch (expected {expected}, got {actual})"
        )


class ExperimentConfigError(ScdcnnError, ValueError):
    """Unknown experiment id or an override the experiment cannot honour."""


class ExternalDataRequiredError(ScdcnnError, RuntimeError):
    """The run needs trained weights and/or MNIST files that were not supplied."""


__all__ = [
    "ScdcnnError",
    "ScRangeError",
    "ContractError",
    "ParseError",
    "FormatError",
    "ShapeMismatchError",
    "ExperimentConfigError",
    "ExternalDataRequiredError",
]
