"""Shared exception types.

Every domain failure raised by this package derives from ParvaultError so
callers (and the CLI exit-code logic) can catch one base class. Modules define
their own subclasses next to the code that raises them; only the ones used
across module boundaries live here.
"""


class ParvaultError(Exception):
    """Base class for every domain error in the package."""


class ValidationError(ParvaultError):
    """A parameter failed its documented precondition."""
