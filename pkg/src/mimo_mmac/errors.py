"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class MmacError(Exception):
    """Base class for all library errors."""


class ConfigurationError(MmacError):
    """Inconsistent dimensions or parameters."""


class ValidationError(MmacError):
    """Input violates a numerical contract (Hermitian, PSD, range)."""


class TrialError(MmacError):
    """A Monte-Carlo evaluator produced a non-finite value."""

    def __init__(self, trial: int, value: float):
        super().__init__(f"trial {trial}: evaluator returned non-finite value {value!r}")
        self.trial = trial
        self.value = value
