"""Exception types shared across the package."""


class PsalabError(ValueError):
    """Base class for all errors raised by psalab."""


class DomainError(PsalabError):
    """A physical or numerical precondition was violated."""


class ConfigError(PsalabError):
    """A configuration document failed validation."""
