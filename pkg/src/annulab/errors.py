"""Exception hierarchy shared by every module."""

from __future__ import annotations


class AnnulabError(Exception):
    """Base class for all errors raised by annulab."""


class ConfigError(AnnulabError, ValueError):
    """Bad user input: unknown names, malformed parameters."""


class InvalidDomainError(ConfigError):
    pass


class InvalidResolutionError(ConfigError):
    pass


class LevelOutOfRangeError(ConfigError, IndexError):
    pass


class UnknownSurfaceError(ConfigError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class ComputationError(AnnulabError):
    """A numerical construction or solve could not be completed."""


class DegenerateImmersionError(ComputationError):
    pass


class PoleOnAnnulusError(ComputationError):
    pass


class NonvanishingPeriodError(ComputationError):
    """Weierstrass data whose real periods do not vanish on the core loop."""

    def __init__(self, message: str, periods) -> None:
        super().__init__(message)
        self.periods = periods


class SolverDivergenceError(ComputationError):
    pass


class CompatibilityError(ComputationError):
    def __init__(self, message: str, defect: float) -> None:
        super().__init__(message)
        self.defect = defect


class NotClosedError(ComputationError):
    pass


class FrameNotTangentError(ComputationError):
    pass
