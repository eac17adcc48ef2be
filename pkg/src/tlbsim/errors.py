"""Exception types shared across the simulator."""


class MappingFormatError(ValueError):
    """A mapping dump file violates the line format, ordering, or uniqueness."""

    def __init__(self, path, line_no, reason):
        self.path = path
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"{path}:{line_no}: {reason}")


class TraceFormatError(ValueError):
    """An access-trace file is malformed."""

    def __init__(self, path, line_no, reason):
        self.path = path
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"{path}:{line_no}: {reason}")


class UnmappedAccessError(RuntimeError):
    """A trace access touched a virtual page with no mapping.

    Trace integrity is a precondition of every scheme; the simulation aborts
    and reports the offending access index (filled in by the driver).
    """

    def __init__(self, vpn, index=None):
        self.vpn = vpn
        self.index = index
        at = f" at access #{index}" if index is not None else ""
        super().__init__(f"access to unmapped vpn 0x{vpn:x}{at}")


class ConfigError(ValueError):
    """A run configuration (file or CLI flags) is invalid."""
