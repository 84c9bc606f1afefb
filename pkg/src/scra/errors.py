"""Exception taxonomy shared by the library and the CLI.

The CLI maps these onto process exit codes: argument errors exit 2,
capability errors exit 3 and integrity errors exit 4.
"""


class ScraError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(ScraError, ValueError):
    """A caller-supplied value violates a documented precondition."""


class CapabilityError(ScraError, RuntimeError):
    """The request is valid but outside the supported parameter envelope."""


class IntegrityError(ScraError, RuntimeError):
    """An internal invariant was violated; indicates corrupted input or a bug."""
