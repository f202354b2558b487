"""Exception types shared across the package."""

from __future__ import annotations


class LeakScopeError(Exception):
    """Base class for all errors raised by this package."""


class JavaSyntaxError(LeakScopeError):
    """The source text is not a syntactically valid method."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnsupportedConstructError(LeakScopeError):
    """A construct the control-flow model does not cover."""

    def __init__(self, construct: str, line: int):
        super().__init__(f"unsupported construct: {construct} (line {line})")
        self.construct = construct
        self.line = line


class PathExplosionError(LeakScopeError):
    """Path enumeration exceeded the configured ceiling."""

    def __init__(self, limit: int):
        super().__init__(f"path explosion: more than {limit} control-flow paths (ceiling {limit})")
        self.limit = limit


class ProviderError(LeakScopeError):
    """An intention provider failed to produce an answer."""

    def __init__(self, message: str, request_id: str | None = None):
        super().__init__(message)
        self.request_id = request_id


class ProviderTransportError(ProviderError):
    """The remote provider was unreachable after all retries."""


class FixtureLookupError(ProviderError):
    """The fixture table has no canned answer for the snippet."""


class DatasetFormatError(LeakScopeError):
    """An evaluation dataset record is malformed or incomplete."""
