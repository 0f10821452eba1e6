"""Exception types shared across the package."""


class MagbotError(Exception):
    """Base class for all package-specific errors."""


class InvalidParams(MagbotError):
    """A constructor or generator received non-positive or otherwise unusable parameters."""


class TooManyMovers(MagbotError):
    """More movers requested than there are tile centers to place them on."""


class ParseError(MagbotError):
    """Scene document is not syntactically valid or a field has the wrong type.

    Carries ``line`` (1-based, when known) and ``field`` (dotted path, when known).
    """

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        super().__init__(message)
        self.line = line
        self.field = field


class SchemaError(MagbotError):
    """Scene document contains unknown keys or is missing required ones."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ValidationError(MagbotError):
    """Scene violates semantic invariants; carries the full validation report."""

    def __init__(self, report):
        super().__init__("; ".join(f"{v.code}({v.subject})" for v in report.violations))
        self.report = report


class UnknownMoverId(MagbotError):
    """A command map referenced a mover id not present in the scene."""


class SceneTaskMismatch(MagbotError):
    """A scene lacks the bodies its task family requires."""


class SamplingExhausted(MagbotError):
    """Rejection sampling failed to find a valid configuration within the attempt cap."""


class ActionShapeError(MagbotError):
    """Action does not match the environment's contract (wrong shape or missing agent keys)."""


class SteppedTerminatedEpisode(MagbotError):
    """step() called after the episode terminated or truncated, without reset()."""


class CountMismatch(MagbotError):
    """Records contain more goals than the configured total."""


class InsufficientSuccesses(MagbotError):
    """Records contain fewer goal completions than the metric requires."""


class WindowTooLong(MagbotError):
    """Smoothness window exceeds the recorded duration."""


class MissingTimings(MagbotError):
    """Records carry no planner compute-time samples."""
