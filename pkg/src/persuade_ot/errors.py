"""Exception types shared across the package."""

from __future__ import annotations

from typing import Any


class DegenerateMeasureError(ValueError):
    """A discretized density carries no mass anywhere on the grid."""


class SingularPenaltyError(ValueError):
    """Site separation too small: the repulsion term is not finite."""


class ConvergenceError(RuntimeError):
    """A fixed-point solve exhausted its iteration budget.

    Carries the final mass residual so callers can decide whether the
    partial answer is still usable.
    """

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = float(residual)


class NumericFailure(RuntimeError):
    """The objective or its gradient became non-finite during a run.

    Carries the last valid iterate so the caller can dump state.
    """

    def __init__(
        self,
        message: str,
        last_params: Any = None,
        last_value: float | None = None,
        iteration: int | None = None,
    ):
        super().__init__(message)
        self.last_params = last_params
        self.last_value = last_value
        self.iteration = iteration


class ConfigError(ValueError):
    """Invalid experiment configuration; ``key`` names the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key
