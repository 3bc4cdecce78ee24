"""Error types shared by the system layer."""


class SystemError_(ValueError):
    """Base class; the trailing underscore avoids shadowing the builtin."""


class UnsupportedRuleError(SystemError_):
    pass


class RuleParseError(SystemError_):
    pass


class ExtensionError(SystemError_):
    """A point cannot be materialized over the requested coordinates."""


class DefinitionError(SystemError_):
    """Malformed system definition; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class PrecisionError(SystemError_):
    """Requested depth not reachable; ``achieved`` holds the depth that was."""

    def __init__(self, message: str, achieved: int = 0):
        super().__init__(message)
        self.achieved = achieved
