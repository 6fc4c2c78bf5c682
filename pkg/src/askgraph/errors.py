"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class AskGraphError(Exception):
    """Base class for all engine errors."""


# --- question graphs ---------------------------------------------------------

class GraphError(AskGraphError):
    """An invariant of the question graph was violated."""


class EmptyInput(GraphError):
    pass


class DisconnectedGraph(GraphError):
    pass


class NoUnknown(GraphError):
    pass


# --- question understanding --------------------------------------------------

class ProviderUnavailable(AskGraphError):
    """A remote provider (QU model, sentence embedder) could not be reached."""


class NoPatternsExtracted(AskGraphError):
    pass


class MalformedModelOutput(AskGraphError):
    """Model text does not follow the pattern grammar.

    ``offset`` is the UTF-8 byte offset of the first violation.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


# --- semantic affinity -------------------------------------------------------

class EmptyAfterNormalization(AskGraphError):
    pass


# --- SPARQL client -----------------------------------------------------------

class Transport(AskGraphError):
    """Network-level failure (connection refused, timeout) after retries."""


class EndpointError(AskGraphError):
    """The endpoint answered with an HTTP error status."""

    def __init__(self, status: int, body_excerpt: str):
        super().__init__(f"endpoint returned HTTP {status}: {body_excerpt}")
        self.status = status
        self.body_excerpt = body_excerpt


class MalformedResults(AskGraphError):
    pass


class UnsupportedDialect(AskGraphError):
    pass


# --- linking and planning ----------------------------------------------------

class NoAnchorVertices(AskGraphError):
    """Relation linking has no vertex to probe (both endpoints unlinked)."""


class NoViableBGP(AskGraphError):
    """An annotated graph element has no candidates, so no query can be built."""


# --- execution and service ---------------------------------------------------

class AllPlansFailed(AskGraphError):
    pass


class MalformedBenchmark(AskGraphError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class ConfigError(AskGraphError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class PhaseError(AskGraphError):
    """Pipeline failure annotated with the phase that raised it."""

    def __init__(self, phase: str, cause: Exception):
        super().__init__(f"{phase}: {cause}")
        self.phase = phase
        self.cause = cause
