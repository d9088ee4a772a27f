"""Exception hierarchy shared by all pipeline stages.

Two error families matter to callers: configuration/IO problems
(bad files, unparseable flags) and domain problems (unknown words,
empty results where a stage requires input). The CLI maps them to
exit codes 1 and 2 respectively.
"""


class TopicdrawError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TopicdrawError):
    """Unreadable/invalid input files or invalid configuration values."""


class DomainError(TopicdrawError):
    """A request that is well-formed but impossible on this corpus."""


class UnknownWordError(DomainError):
    """A queried word is not in the vocabulary (or not in the required scope)."""

    def __init__(self, word: str, detail: str = "unknown word"):
        super().__init__(f"{detail}: {word}")
        self.word = word


class EmptyResultError(DomainError):
    """An operation whose precondition forbids an empty input/result."""
