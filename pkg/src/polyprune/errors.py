"""Exception types shared across the toolkit."""


class PolypruneError(Exception):
    """Base class for every error the toolkit raises deliberately."""


class FormatError(PolypruneError):
    """A binary container or text file does not match its documented layout."""


class ValidationError(PolypruneError):
    """A loaded or constructed object violates one of its structural invariants."""


class CaptureError(PolypruneError):
    """An activation-capture request names an unknown layer or block index."""


class CorpusError(PolypruneError):
    """A corpus cannot support the requested sampling or parsing."""


class DataError(PolypruneError):
    """An evaluation data file contains malformed or inconsistent rows."""
