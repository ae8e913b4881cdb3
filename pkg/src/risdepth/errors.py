"""Exception types raised across the package."""


class RisDepthError(Exception):
    """Base class for all errors raised by risdepth."""


class ZeroDistance(RisDepthError, ValueError):
    """The feeding antenna coincides with an RIS element."""


class EmptyScene(RisDepthError, ValueError):
    """A scene has neither targets nor injected paths."""


class ParseError(RisDepthError, ValueError):
    """A path-trace row could not be parsed."""

    def __init__(self, row, message):
        self.row = row
        super().__init__(f"row {row}: {message}")


class ValidationError(RisDepthError, ValueError):
    """A path-trace row parsed but holds physically invalid values."""

    def __init__(self, row, message):
        self.row = row
        super().__init__(f"row {row}: {message}")


class DimensionMismatch(RisDepthError, ValueError):
    pass


class RangeOverflow(RisDepthError, ValueError):
    """A path delay is not shorter than the active chirp duration."""


class DegenerateGrid(RisDepthError, ValueError):
    pass


class ConfigError(RisDepthError, ValueError):
    """A run configuration is malformed or violates a constraint."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
