"""Exception types shared across the package.

Every error raised by the library is a ModelError subclass, so callers can
catch one base type. The subclasses mirror the failure classes used in the
documentation: bad arguments, membership violations, structural mismatches,
size-bound overruns, unmet preconditions, formulas outside the language a
rule accepts, and bad runtime configuration.
"""
from __future__ import annotations


class ModelError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(ModelError):
    """A value violates a constructor or argument invariant."""


class DomainError(ModelError):
    """A behaviour, component, or variable is not a member of the expected set."""


class StructuralError(ModelError):
    """Component sets or shared component declarations do not line up."""


class CapacityError(ModelError):
    """A constructed behaviour set would exceed the configured cardinality cap."""


class PreconditionError(ModelError):
    """An operation's stated precondition does not hold for these inputs."""


class LanguageError(ModelError):
    """A formula lies outside the fragment an operation accepts."""


class ConfigurationError(ModelError):
    """Runtime configuration is missing or malformed (caps, universes, env vars)."""


class ParseError(ModelError):
    """A model or formula text is syntactically invalid."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self) -> str:
        if self.line:
            return f"{self.line}:{self.column}: {self.message}"
        return self.message
