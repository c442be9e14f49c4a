"""Exception hierarchy shared across the toolkit."""


class ScamdynError(Exception):
    """Base class for all toolkit errors."""


class DegenerateDenominator(ScamdynError):
    """R0 formula evaluated on its domain boundary (gamma+psi = 0 or mu+lambda-delta = 0)."""


class SingularV(ScamdynError):
    """Transition matrix of the next-generation decomposition is not invertible."""


class NonPositiveComponent(ScamdynError):
    """Logarithmic Lyapunov function requires strictly positive compartments."""


class NonFiniteState(ScamdynError):
    """A simulated state became NaN or infinite (reference-scheme blow-up)."""


class SimulationFailure(ScamdynError):
    """A simulation inside a likelihood or sweep evaluation failed."""


class EmptyChain(ScamdynError):
    """No samples remain after burn-in."""


class InvalidRange(ScamdynError):
    """A sampling range has low >= high."""


class DegenerateDesign(ScamdynError):
    """A residual vector in the partial-correlation computation is numerically zero."""


class HorizonExceedsTrajectory(ScamdynError):
    """Burden integral requested beyond the simulated horizon."""


class GridMismatch(ScamdynError):
    """Report series being pooled do not share the same month grid."""


class ParseError(ScamdynError):
    """A CSV line failed to parse."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class GapError(ScamdynError):
    """A monthly series has a missing month."""

    def __init__(self, month: str):
        super().__init__(f"missing month {month}")
        self.month = month


class DuplicateError(ScamdynError):
    """Duplicate (month, province) row in a report file."""

    def __init__(self, month: str, province: str):
        super().__init__(f"duplicate entry for {province} {month}")
        self.month = month
        self.province = province


class ConfigError(ScamdynError):
    """Invalid or unknown key in a run configuration."""
