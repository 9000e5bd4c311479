"""Error taxonomy for the fixture exporter.

``JobError`` means the job specification itself is unusable (bad polynomial,
unsupported degree, malformed S-prime list) — the caller should fix the
request.  ``ComputationError`` means the job was well-formed but the backend
computation could not be completed or certified for this input (e.g. a
decomposition type outside the supported range, or a certification check
failed).  ``BackendUnavailable`` means a required computer-algebra library is
missing from the environment.
"""


class ExporterError(Exception):
    """Base class for all exporter failures."""


class BackendUnavailable(ExporterError):
    """A required computer-algebra backend library is not importable."""


class JobError(ExporterError, ValueError):
    """The export job specification is invalid or unsupported."""


class ComputationError(ExporterError):
    """The backend computation failed or could not be certified."""
