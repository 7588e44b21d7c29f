"""Exceptions raised when a runtime-checked guarantee does not hold."""

from typing import Any


class ContractViolation(RuntimeError):
    """A post-condition failed. `invariant` names it for the CLI exit message."""

    def __init__(self, invariant: str, message: str, deviation: float | None = None):
        self.invariant = invariant
        self.deviation = deviation
        detail = f" (deviation {deviation:.3e})" if deviation is not None else ""
        super().__init__(f"[{invariant}] {message}{detail}")


class DegenerateRecovery(ValueError):
    """Recovery input was collinear: the best rank-1 point is already symmetric."""

    def __init__(self, message: str, tensor: Any):
        self.tensor = tensor
        super().__init__(message)
