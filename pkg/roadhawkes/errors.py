# roadhawkes/errors.py
"""
Exception hierarchy.

Every error raised on purpose by roadhawkes derives from `RoadHawkesError`
and from the builtin it refines, so callers may catch either the domain
class, the builtin, or the root.
"""

from __future__ import annotations

from typing import Sequence


class RoadHawkesError(Exception):
    """Root of all deliberate roadhawkes errors."""


class CatalogError(RoadHawkesError, ValueError):
    """Event CSV could not be turned into a valid catalog.

    `problems` holds (line number, message) pairs, one per rejected row.
    """

    def __init__(self, message: str, problems: Sequence[tuple[int, str]] = ()) -> None:
        self.problems: list[tuple[int, str]] = list(problems)
        if self.problems:
            detail = "; ".join(f"line {ln}: {msg}" for ln, msg in self.problems[:10])
            more = len(self.problems) - 10
            if more > 0:
                detail += f"; ... {more} more"
            message = f"{message} ({detail})"
        super().__init__(message)


class KernelError(RoadHawkesError, ValueError):
    pass


class DegenerateModelError(RoadHawkesError, ArithmeticError):
    """The conditional intensity vanished at an observed event."""


class InconsistentStateError(RoadHawkesError, RuntimeError):
    pass


class SubcriticalityError(RoadHawkesError, RuntimeError):
    """Branching ratio reached the explosive regime."""


class MonotoneInfeasibleError(RoadHawkesError, ValueError):
    def __init__(self, message: str, violated: Sequence[float] = ()) -> None:
        self.violated: list[float] = [float(v) for v in violated]
        if self.violated:
            shown = ", ".join(f"{v:g}" for v in self.violated[:8])
            message = f"{message} (violated at {shown})"
        super().__init__(message)


class MonotoneConvergenceError(RoadHawkesError, RuntimeError):
    pass


class SimulationError(RoadHawkesError, RuntimeError):
    pass


class ValidationPreconditionError(RoadHawkesError, ValueError):
    pass


class LocalizationError(RoadHawkesError, ValueError):
    pass


class ConfigError(RoadHawkesError, ValueError):
    pass
