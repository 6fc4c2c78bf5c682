"""On-demand question answering over arbitrary SPARQL endpoints."""

from .affinity import EmbeddingStore, affinity
from .config import PipelineConfig, load_config
from .graph import PGP, AnswerTypePrediction, PhraseTerm, PhraseTriplePattern, build_pgp
from .linker import LinkerParams, annotate
from .pipeline import answer_question, run_benchmark
from .planner import QueryPlan, plan
from .sparql import EndpointConfig

__version__ = "0.1.0"

__all__ = [
    "AnswerTypePrediction",
    "EmbeddingStore",
    "EndpointConfig",
    "LinkerParams",
    "PGP",
    "PhraseTerm",
    "PhraseTriplePattern",
    "PipelineConfig",
    "QueryPlan",
    "affinity",
    "annotate",
    "answer_question",
    "build_pgp",
    "load_config",
    "plan",
    "run_benchmark",
    "__version__",
]
