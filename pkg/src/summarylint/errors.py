"""Exception hierarchy shared across the toolchain."""


class SummarylintError(Exception):
    """Base class for all errors raised by this package."""


class NoHeadingsFound(SummarylintError):
    """The input text contains no detectable section headings."""


class SectionNotFound(SummarylintError):
    """The manuscript has no section of the requested kind."""


class SchemaCorrupt(SummarylintError):
    """The embedded category schema asset failed validation."""


class BackendFailure(SummarylintError):
    """An analysis backend failed to produce a usable output."""


class NoImradContent(SummarylintError):
    """The manuscript contains only summary sections; nothing to verify against."""


class ClauseParseFailure(SummarylintError):
    """A pronoun's clause could not be deconstructed (e.g. a fragment)."""


class UnboundSlot(SummarylintError):
    """A prompt template slot was left unbound at render time."""


class NetworkFailure(BackendFailure):
    """A live backend request failed at the transport level."""


class ReplayExhausted(BackendFailure):
    """The replay store has no recorded output for the requested run index."""


class RateLimited(BackendFailure):
    """A live request was rejected for exceeding the configured rate."""


class ParseFailure(SummarylintError):
    """A model output could not be parsed into a structured report."""


class EmptySeries(SummarylintError):
    """A series configuration requests zero runs or has no criteria."""


class IoFailure(SummarylintError):
    """A file export or import failed."""
