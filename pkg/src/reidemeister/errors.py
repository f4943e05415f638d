"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` (e.g. ``NOT_EMBEDDED``)
plus optional structured details, so reports and the CLI can print stable
diagnostics.
"""


class KnotError(Exception):
    code = "ERROR"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details

    def __str__(self):
        if not self.details:
            return f"{self.code}: {self.message}"
        extra = " ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"{self.code}: {self.message} ({extra})"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, tuple):
        return "(" + ",".join(_fmt(x) for x in v) + ")"
    return str(v)


class SpecParseError(KnotError):
    code = "PARSE_ERROR"

    def __init__(self, message, line=None):
        super().__init__(message, line=line)
        self.line = line


class NotEmbedded(KnotError):
    code = "NOT_EMBEDDED"


class NewtonDiverged(KnotError):
    code = "NEWTON_DIVERGED"


class Degenerate(KnotError):
    code = "DEGENERATE"


class PerturbationFailed(KnotError):
    code = "PERTURBATION_FAILED"


class AmbiguousZ(KnotError):
    code = "AMBIGUOUS_Z"


class MalformedCode(KnotError):
    code = "MALFORMED_CODE"

    def __init__(self, message, position=None):
        super().__init__(message, position=position)
        self.position = position


class StaleSite(KnotError):
    code = "STALE_SITE"


class NotAnIsotopy(KnotError):
    code = "NOT_AN_ISOTOPY"


class EndpointNotGeneric(KnotError):
    code = "ENDPOINT_NOT_GENERIC"


class ResolutionConflict(KnotError):
    code = "RESOLUTION_CONFLICT"


class DegenerateCusp(KnotError):
    code = "DEGENERATE_CUSP"


class DegenerateTangency(KnotError):
    code = "DEGENERATE_TANGENCY"


class DegenerateTriple(KnotError):
    code = "DEGENERATE_TRIPLE"


class UnclassifiedEvent(KnotError):
    code = "UNCLASSIFIED_EVENT"
