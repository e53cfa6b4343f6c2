"""Exceptions raised by spinchsh.

Library code raises these; only the command-line layer turns them into
exit codes. Validation errors also subclass ``ValueError`` so callers that
already guard numeric input with ``except ValueError`` keep working.
"""

from __future__ import annotations


class SpinChshError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(SpinChshError, ValueError):
    """A dimension is below 2 or two objects disagree on their dimension."""


class InvalidDirectionError(SpinChshError, ValueError):
    """A measurement direction is not a unit vector in R^3."""


class DegenerateStateError(SpinChshError, ValueError):
    """A state vector cannot be normalized (zero norm)."""


class InvalidStateError(SpinChshError, ValueError):
    """A density matrix violates one of the state invariants.

    Attributes:
        invariant: Which check failed: ``shape``, ``finite``,
            ``hermitian``, ``unit-trace`` or ``positive-semidefinite``.
    """

    def __init__(self, invariant: str, message: str) -> None:
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class NumericalInconsistencyError(SpinChshError):
    """A quantity that must be real came out with a sizeable imaginary part."""

    def __init__(self, quantity: str, residue: float, threshold: float) -> None:
        super().__init__(
            f"{quantity} has imaginary residue {residue:.3e} above threshold {threshold:.1e}"
        )
        self.quantity = quantity
        self.residue = residue
        self.threshold = threshold


class NotPureError(SpinChshError, ValueError):
    """A pure-state-only operation received a mixed state."""


class PreconditionError(SpinChshError, ValueError):
    """Family parameters fall outside the range a closed form is valid for."""


class StateFileError(SpinChshError):
    """A state file is malformed or uses an unsupported version."""
