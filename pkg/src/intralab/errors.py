"""Exception types shared across the package."""


class IntralabError(Exception):
    """Base class for all domain errors raised by this package."""


class TruncatedInputError(IntralabError):
    """Raised when an input file ends before the requested samples."""


class FormatError(IntralabError):
    """Raised when an input file does not parse as the declared format."""


class CausalityError(IntralabError):
    """Raised on any read of reconstruction samples that were never committed."""


class CommitOrderError(IntralabError):
    """Raised when a block is committed out of raster-scan order."""


class ValidationError(IntralabError):
    """Raised when a run configuration is inconsistent or out of range."""


class ReplayMismatchError(IntralabError):
    """Raised when the decode-side replay derives a different result than the encoder."""
