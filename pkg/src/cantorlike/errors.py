"""Exception hierarchy shared by every module."""


class CantorError(Exception):
    """Base class for all library errors."""


class DomainError(CantorError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(CantorError, ValueError):
    """A family parameter violates its constraint.

    ``constraint`` names the failing condition and ``step`` is the first
    construction step at which it fails (``None`` for scalar parameters).
    """

    def __init__(self, family, constraint, step=None, detail=""):
        self.family = family
        self.constraint = constraint
        self.step = step
        self.detail = detail
        msg = f"{family}: constraint {constraint} violated"
        if step is not None:
            msg += f" at step {step}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)

    def report(self):
        return {
            "family": self.family,
            "constraint": self.constraint,
            "step": self.step,
            "detail": self.detail,
        }


class NotEmbeddable(CantorError):
    """The family has no two-sequence (k_n, c_n) description."""


class CapExceeded(CantorError):
    """A generation would hold more intervals than the configured cap."""

    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(
            f"generation needs {count} intervals, exceeding the interval cap {cap} "
            "(set CANTOR_INTERVAL_CAP to raise it)"
        )


class NoLimit(CantorError):
    """A ratio or sequence limit could not be established."""


class NotApplicable(CantorError):
    """The operation does not cover this family."""


class BracketUnavailable(CantorError):
    """No tail bound is available to bracket a limit measure."""


class TranscriptionError(CantorError, AssertionError):
    """Two independent derivations of the same closed form disagree."""


class SpecParseError(CantorError, ValueError):
    """A serialized spec is malformed."""
