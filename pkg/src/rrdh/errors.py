"""Exception types shared across the package."""


class RRDHError(Exception):
    """Base class for all package errors."""


class PgmFormatError(RRDHError, ValueError):
    """Malformed PGM header or truncated pixel data."""


class UnsupportedFormatError(PgmFormatError):
    """Well-formed PNM file that this package does not handle (P2, P6, maxval != 255...)."""


class CapacityError(RRDHError, ValueError):
    """Payload does not fit the cover image.

    ``achievable`` is the number of secret bits the image could carry with
    the requested configuration (0 when nothing fits).
    """

    def __init__(self, message, achievable=0):
        super().__init__(message)
        self.achievable = achievable


class MapDecodeError(RRDHError, ValueError):
    """Compressed location map cannot be decoded."""


class IntegrityError(RRDHError):
    """Extraction could not complete cleanly.

    ``partial`` holds whatever the extractor recovered (an ``ExtractResult``),
    so robustness benchmarks can still score the damaged output.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CorruptAuxError(IntegrityError):
    """Auxiliary information read from the border is inconsistent."""
