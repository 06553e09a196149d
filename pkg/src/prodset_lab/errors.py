"""Exception types shared across the package."""


class LabError(Exception):
    """Base class for all errors raised by prodset_lab."""


class GroupMismatchError(LabError):
    """Operands belong to different groups or carry malformed payloads."""


class BallCapError(LabError):
    """Predicted ball cardinality exceeds the configured cap."""


class SupportCapError(LabError):
    """Convolution support grew past the configured cap."""

    def __init__(self, size: int, cap: int):
        super().__init__(f"convolution support {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


class CoverHypothesisError(LabError):
    """Greedy cover hypothesis U >= correlation_set(E, E) is violated."""

    def __init__(self, violator):
        super().__init__(
            f"element {violator!r} has m(E & k.E) > 0 but lies outside U"
        )
        self.violator = violator


class NonUnitaryRepError(LabError):
    """Representation images fail the unitarity (or relation) check."""


class StationaryConvergenceError(LabError):
    """Power iteration did not reach the requested fixed-point residual."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"residual {residual:.3e} after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


class DegenerateInputError(LabError):
    """Witness search received an input for which the task is vacuous."""


class WitnessSearchError(LabError):
    """No verified witness found within the search budget."""


class CircleCoverageError(LabError):
    """The translated arc family covers the whole circle at this resolution."""

    def __init__(self, total_length: float):
        super().__init__(
            f"translated arcs cover the circle (total length {total_length:.6f} >= 1)"
        )
        self.total_length = total_length


class ConfigError(LabError):
    """Malformed experiment configuration."""
