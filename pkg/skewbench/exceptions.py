"""
Error hierarchy shared by every skewbench module.
"""
from typing import Optional


class SkewBenchError(Exception):
    """Base class for all skewbench errors."""


class DomainError(SkewBenchError, ValueError):
    """An input lies outside the domain of a formula or operation."""


class ValidityError(DomainError):
    """Contamination exceeds the range in which the bias model stays a precision."""


class CapacityError(DomainError):
    """A sampling pool holds fewer eligible instances than requested."""

    def __init__(self, label: str, required: int, available: int):
        self.label = label
        self.required = required
        self.available = available
        super().__init__(
            f"insufficient {label} instances: required {required}, available {available}"
        )


class ParseError(SkewBenchError, ValueError):
    """A line of an input file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:"
        if line is not None:
            location = f"{location}{line}: "
        elif location:
            location = f"{location} "
        super().__init__(f"{location}{message}")


class ConfigError(SkewBenchError):
    """An experiment configuration is inconsistent."""


__all__ = [
    "SkewBenchError",
    "DomainError",
    "ValidityError",
    "CapacityError",
    "ParseError",
    "ConfigError",
]
