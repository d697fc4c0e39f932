"""Exception types shared across the package."""


class LindynError(Exception):
    """Base class for all package-specific errors."""


class NonSymmetric(LindynError):
    """Matrix expected to be symmetric exceeds the symmetry tolerance."""


class IndefiniteInput(LindynError):
    """Matrix has an eigenvalue below the PSD clamp threshold."""


class NonFinite(LindynError):
    """Matrix contains NaN or Inf entries."""


class ZeroMatrix(LindynError):
    """Operation undefined for the all-zero matrix."""


class BadRank(LindynError):
    """Requested target rank outside [1, d]."""


class DimensionMismatch(LindynError):
    """Operand shapes are inconsistent."""


class Diverged(LindynError):
    """Trajectory produced non-finite entries (or broke monotonicity).

    Carries the partial trajectory record, when available, for diagnosis.
    """

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class DegenerateTarget(LindynError):
    """Target matrix has a zero signal singular value."""


class ZeroVector(LindynError):
    """Hidden-layer vector norm is numerically zero."""


class AllEqual(LindynError):
    """All target singular values coincide; gap constant undefined."""


class NotActiveRegion(LindynError):
    """Stopping-time prediction requires the active region (delta > 0)."""


class ScheduleMismatch(LindynError):
    """Two trajectory records do not share a recording schedule."""


class ConfigError(LindynError):
    """Invalid run/sweep configuration."""
