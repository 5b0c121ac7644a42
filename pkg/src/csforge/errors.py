"""Exception types shared across the pipeline.

Per-record failures (everything derived from RecordSkip) are soft: the
pipeline counts them in the skip report and moves on. Everything else is
fatal for the operation that raised it.
"""


class CsForgeError(Exception):
    """Base class for all errors raised by this package."""


# --- audio ---------------------------------------------------------------


class MalformedWav(CsForgeError):
    """WAV header or codec is not one this reader supports."""


class InvalidCutoff(CsForgeError):
    """Bandpass cutoffs violate 0 < low < high < rate/2."""


class EmptyBuffer(CsForgeError):
    """Operation requires a non-empty audio buffer."""


class SpanOutOfRange(CsForgeError):
    """Time span falls outside the buffer it refers to."""


class OverlappingSpans(CsForgeError):
    """Splice spans overlap or are not sorted ascending."""


class RateMismatch(CsForgeError):
    """Buffers that must share a sample rate do not."""


# --- corpus --------------------------------------------------------------


class ManifestParseError(CsForgeError):
    """Manifest row is structurally invalid; message names the line."""


class TooFewLanguages(CsForgeError):
    """Pair enumeration needs at least two languages."""


# --- backends ------------------------------------------------------------


class BackendUnavailable(CsForgeError):
    """Backend process/endpoint cannot be reached."""


class BackendTimeout(CsForgeError):
    """Backend did not answer within the configured timeout."""


class BackendMalformedResponse(CsForgeError):
    """Backend answered with something that does not parse as a response."""


class ProtocolError(CsForgeError):
    """Backend answered with an in-protocol error object."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


# --- text ----------------------------------------------------------------


class UnmappableCharacter(CsForgeError):
    """Character outside the Latin/Cyrillic/Greek romanization repertoire."""

    def __init__(self, char: str, lang: str):
        super().__init__(f"cannot romanize U+{ord(char):04X} ({char!r}) in {lang!r} text")
        self.char = char
        self.lang = lang


class UnparsableDocument(CsForgeError):
    """Mapper response document has no usable structure."""


# --- per-record soft failures ---------------------------------------------


class RecordSkip(CsForgeError):
    """Base for failures that skip one record and increment a counter."""

    reason = "skipped"


class NoEligiblePairs(RecordSkip):
    reason = "no_eligible_pairs"


class SubstitutionMiss(RecordSkip):
    reason = "substitution_miss"


class AlignmentFailed(RecordSkip):
    reason = "alignment_failed"


class WordNotAligned(RecordSkip):
    reason = "word_not_aligned"


class DegenerateConversion(RecordSkip):
    """VC backend output failed the duration guard; caller keeps the
    unconverted audio and flags the record instead of dropping it."""

    reason = "degenerate_conversion"


class EmptyReference(CsForgeError):
    """RER reference romanizes to the empty string."""
