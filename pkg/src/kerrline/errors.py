class KerrlineError(Exception):
    """Base class for all errors raised by kerrline."""


class ConfigError(KerrlineError, ValueError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class NumericalError(KerrlineError, RuntimeError):
    """A computation could not produce a trustworthy result."""


class FewerRootsThanRequested(NumericalError):
    def __init__(self, found, requested, k_max):
        self.found = found
        self.requested = requested
        super().__init__(
            f"found {found} of {requested} requested modes below k_max={k_max:.6g} 1/m; "
            "raise k_max"
        )


class DegenerateBracket(NumericalError):
    pass


class SumRuleViolation(NumericalError):
    pass


class IdentityViolation(NumericalError):
    pass


class NotASquid(KerrlineError, ValueError):
    pass


class NearHalfQuantum(NumericalError):
    pass


class NotConverged(NumericalError):
    pass


class NoCrossingFound(NumericalError):
    pass


class TraceDrift(NumericalError):
    pass


class StepTooLarge(NumericalError):
    pass


class TruncationTooSmall(KerrlineError, ValueError):
    pass


class PhaseTargetUnreachable(NumericalError):
    pass
