"""Exception hierarchy.

Every error carries a module-qualified ``code`` (``"<module>/<Name>"``) that
the command line surfaces verbatim.
"""
from __future__ import annotations


class RegcutError(Exception):
    module = "regcut"

    @property
    def code(self) -> str:
        return f"{self.module}/{type(self).__name__}"


class ValidationError(RegcutError, ValueError):
    module = "core-model"


class DeadlockLocation(ValidationError):
    def __init__(self, location: str):
        super().__init__(f"location {location!r} has no outgoing transition")
        self.location = location


class IncompleteReads(ValidationError):
    def __init__(self, location: str, datum: str):
        super().__init__(f"location {location!r} reads some datum but has no read of {datum!r}")
        self.location = location
        self.datum = datum


class UndeclaredSymbol(ValidationError):
    def __init__(self, kind: str, name: str):
        super().__init__(f"undeclared {kind} {name!r}")
        self.kind = kind
        self.name = name


class AtomicUnsupported(RegcutError, ValueError):
    """Raised by analyses that rely on monotonicity of non-atomic semantics."""

    module = "coverability"

    def __init__(self, what: str = "this analysis"):
        super().__init__(f"{what} requires a protocol without atomic read-write transitions")


class ParseError(RegcutError, ValueError):
    module = "protocol-dsl"

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnsupportedParameter(RegcutError, ValueError):
    module = "protocol-dsl"


class ResourceLimit(RegcutError, RuntimeError):
    def __init__(self, what: str, cap: int, module: str = "concrete-analysis"):
        super().__init__(f"{what} exceeded the cap of {cap}")
        self.what = what
        self.cap = cap
        self.module = module


class UncertifiedVerdict(RegcutError, ValueError):
    module = "symbolic-graph"


class UnknownLocation(RegcutError, ValueError):
    module = "simulator"
