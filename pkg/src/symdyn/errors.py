"""Exceptions raised by symdyn.

Three families. ArgumentError for input that breaks an operation's contract.
ResourceCapError when an exact enumeration or search would exceed a declared cap.
PreconditionError when the input is legal but the requested construction does not
exist at the current parameters, and the caller might retry with others.

:author: Shay Hill
:created: 2024-03-02
"""

from __future__ import annotations


class SymdynError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(SymdynError, ValueError):
    """An argument violates the contract of the operation.

    Non-positive window lengths, empty cylinder sets, measures that are not
    invariant, bases of measure zero. Nothing was computed.
    """


class InvalidSubshiftError(ArgumentError):
    """The subshift description is malformed or the subshift is empty."""


class InvalidCoverError(ArgumentError):
    """The cylinder sets do not cover the subshift.

    Carries the first admissible block found outside every element.
    """

    def __init__(self, msg: str, witness: tuple[int, ...] | None = None) -> None:
        super().__init__(msg)
        self.witness = witness


class InvalidPartitionError(InvalidCoverError):
    """The cells of a partition overlap or miss part of the subshift."""


class ConfigError(ArgumentError):
    """A system configuration file failed schema validation.

    :param field: dotted path to the offending field
    """

    def __init__(self, msg: str, field: str = "") -> None:
        super().__init__(msg)
        self.field = field


class ResourceCapError(SymdynError, RuntimeError):
    """An exact computation would exceed a declared resource cap.

    Nothing is truncated silently. The caller can raise the cap (``--cap-states``
    on the command line) or shrink the problem.
    """

    def __init__(self, msg: str, cap: str, limit: int) -> None:
        super().__init__(msg)
        self.cap = cap
        self.limit = limit


class PreconditionError(SymdynError, ValueError):
    """The construction does not exist at these parameters. Retry with others."""


class GoodPointNotFoundError(PreconditionError):
    """No point meeting the entropy requirement was found in the search budget.

    :param suggested_window: a larger window N worth retrying with
    """

    def __init__(self, msg: str, suggested_window: int) -> None:
        super().__init__(msg)
        self.suggested_window = suggested_window


class ResolutionTooCoarseError(PreconditionError):
    """No marker cylinder with the required disjoint iterates exists.

    Periodic systems, or a resolution too short for the requested height.
    """
