"""Exception types shared across the package."""

from __future__ import annotations


class MixingError(Exception):
    """Base class for all package errors."""


class NotMixableError(MixingError):
    """Synthesis was asked to mix a configuration that is not perfectly mixable.

    Carries the verdict so callers can report the witness modulus etc.
    """

    def __init__(self, verdict) -> None:
        super().__init__(f"not perfectly mixable: {verdict.describe()}")
        self.verdict = verdict


class GraphFormatError(MixingError):
    """A mixing graph violates the structural constraints (degrees, acyclicity)."""

    def __init__(self, message: str, node: int | None = None) -> None:
        super().__init__(message if node is None else f"node {node}: {message}")
        self.node = node


class InternalContradiction(MixingError):
    """A constructive lemma failed to produce what it guarantees.

    This always indicates an implementation bug, never a property of the
    input, so the full state is dumped instead of falling back silently.
    """

    def __init__(self, message: str, state: object = None) -> None:
        if state is not None:
            message = f"{message}\n  state: {state!r}"
        super().__init__(message)
