"""Exception hierarchy shared across the package.

Configuration problems (bad documents, bad networks) and numerical
failures (solver breakdowns) are kept in separate branches so the CLI
can map them to distinct exit codes.
"""

from __future__ import annotations


class RiverNetError(Exception):
    """Base class for all package errors."""


# -- configuration / validation -------------------------------------------

class ConfigError(RiverNetError):
    """A scenario or network is malformed; nothing was computed."""


class SchemaViolation(ConfigError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class UnknownPreset(ConfigError):
    pass


class CycleDetected(ConfigError):
    pass


class Disconnected(ConfigError):
    pass


class NonpositiveLength(ConfigError):
    pass


class InvalidNetwork(ConfigError):
    pass


class InvalidRobinPair(ConfigError):
    pass


class FlowConservationViolated(ConfigError):
    def __init__(self, junction: int, residual: float):
        self.junction = junction
        self.residual = residual
        super().__init__(
            f"flow not conserved at junction {junction}: residual {residual:.3e}"
        )


class MissingUpstreamDischarge(ConfigError):
    pass


class PropagationConflict(ConfigError):
    pass


class UnsupportedBoundaryCombination(ConfigError):
    pass


# -- numerical failures ----------------------------------------------------

class NumericalError(RiverNetError):
    """A solver failed to produce a usable result."""


class NoConvergence(NumericalError):
    def __init__(self, message: str, best=None, iterations: int = 0,
                 residual: float = float("nan")):
        self.best = best
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)


class SingularFactorization(NumericalError):
    pass


class MortalityNotDominant(NumericalError):
    pass


class NewtonDiverged(NumericalError):
    pass


class PositivityViolated(NumericalError):
    pass


class SignMismatch(NumericalError):
    pass


class NotATree(NumericalError):
    pass
