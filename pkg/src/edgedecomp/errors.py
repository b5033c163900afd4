"""Exception and warning types shared across the package."""

from __future__ import annotations


class DecompError(Exception):
    """Error carrying a short machine-readable code such as ``"empty-part"``.

    The code is what callers (and the CLI) dispatch on; the message is for
    humans.  Extra keyword arguments are kept in ``details`` for reports.
    """

    def __init__(self, code: str, message: str | None = None, **details):
        self.code = code
        self.details = details
        super().__init__(f"{code}: {message}" if message else code)


class ParameterRangeWarning(UserWarning):
    """A parameter lies outside the range where the asymptotic guarantees apply."""


# codes that signal a partial (but well-formed) result rather than bad input
PARTIAL_CODES = frozenset({"packing-incomplete", "shrunk-out"})
