"""Engine-wide exception taxonomy.

Every failure the engine can raise maps to exactly one machine code, which
the HTTP layer forwards verbatim.  Anything escaping this hierarchy is a
bug and surfaces as machine code ``internal``.
"""


class EngineError(Exception):
    machine_code = "internal"


# --- tensor store -----------------------------------------------------------

class StoreError(EngineError):
    machine_code = "store_error"


class BadMagicError(StoreError):
    """First six bytes of a tensor file are not the NPY magic."""

    machine_code = "bad_magic"


class UnsupportedVersionError(StoreError):
    """Tensor file declares a format version other than 1.0."""

    machine_code = "unsupported_version"


class MalformedHeaderError(StoreError):
    """Header dict is truncated, unparseable, or violates the format rules."""

    machine_code = "malformed_header"


class MissingFileError(StoreError):
    machine_code = "missing_file"


class ShapeMismatchError(StoreError):
    """File-declared shape disagrees with the manifest's counts/dims."""

    machine_code = "shape_mismatch"


class DtypeMismatchError(StoreError):
    machine_code = "dtype_mismatch"


class UnknownItemError(StoreError):
    machine_code = "unknown_item"


class CapacityExceededError(StoreError):
    machine_code = "capacity_exceeded"


class ReadOnlyGalleryError(StoreError):
    machine_code = "read_only_gallery"


class DimMismatchError(StoreError):
    machine_code = "dim_mismatch"


# --- similarity scoring -----------------------------------------------------

class ScoringError(EngineError):
    machine_code = "scoring_error"


class ZeroVectorError(ScoringError):
    machine_code = "zero_vector"


class EmptyLocalSetError(ScoringError):
    machine_code = "empty_local_set"


class EmptyCandidateSetError(ScoringError):
    machine_code = "empty_candidate_set"


# --- providers --------------------------------------------------------------

class ProviderError(EngineError):
    machine_code = "provider_error"


class ProviderUnavailableError(ProviderError):
    """Timeout or transport failure before any HTTP status was received."""

    machine_code = "provider_unavailable"


class ProviderRejectedError(ProviderError):
    """Non-2xx response with a body."""

    machine_code = "provider_rejected"

    def __init__(self, status: int, body: str = ""):
        super().__init__(f"provider returned {status}: {body[:200]}")
        self.status = status
        self.body = body


class MalformedResponseError(ProviderError):
    machine_code = "malformed_response"


class QuotaExceededError(ProviderError):
    machine_code = "quota_exceeded"


class UnsupportedPayloadError(ProviderError):
    machine_code = "unsupported_payload"


class EmptyTextError(EngineError):
    machine_code = "empty_text"


# --- request orchestration --------------------------------------------------

class EmptyGalleryError(EngineError):
    machine_code = "empty_gallery"


class NoResultsError(EngineError):
    machine_code = "no_results"


class EmptyPoolError(EngineError):
    machine_code = "empty_pool"


# --- evaluation -------------------------------------------------------------

class MissingJudgmentError(EngineError):
    machine_code = "missing_judgment"


class EmptyReferencesError(EngineError):
    machine_code = "empty_references"


# --- http layer -------------------------------------------------------------

class UnknownModeError(EngineError):
    machine_code = "unknown_mode"


class UnauthenticatedError(EngineError):
    machine_code = "unauthenticated"


class PayloadTooLargeError(EngineError):
    machine_code = "too_large"


class UserExistsError(EngineError):
    machine_code = "user_exists"


class BadCredentialsError(EngineError):
    machine_code = "bad_credentials"
