"""Plan execution, answer post-filtering, and evaluation metrics.

All top-K plans run (recall first); their answers are unioned and then
percolated through the predicted answer type: date/numeric/boolean answers
must carry a matching literal datatype, string answers with a class type
must be semantically close to the predicted semantic type.  Answers with no
class type are kept, so filtering never starves recall.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .affinity import EmbeddingStore, affinity
from .errors import AllPlansFailed, MalformedBenchmark
from .linker import local_name, split_words
from .planner import ASK, QueryPlan
from .sparql import EndpointConfig, RDFTerm, execute_ask, execute_select

logger = logging.getLogger("askgraph.execution")

XSD = "http://www.w3.org/2001/XMLSchema#"
DATE_DATATYPES = frozenset(
    XSD + name for name in ("date", "dateTime", "gYear", "gYearMonth")
)
NUMERIC_DATATYPES = frozenset(
    XSD + name
    for name in (
        "integer", "decimal", "double", "float", "long", "int", "nonNegativeInteger",
    )
)
XSD_BOOLEAN = XSD + "boolean"

DTYPE_MISMATCH = "dtype_mismatch"
STYPE_MISMATCH = "stype_mismatch"


@dataclass(frozen=True)
class RawAnswer:
    term: RDFTerm
    class_type: str | None = None
    source_rank: int = 0


@dataclass
class AnswerSet:
    answers: list[RawAnswer] = field(default_factory=list)
    dropped: list[tuple[RawAnswer, str]] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


def execute_plans(
    plans: list[QueryPlan],
    cfg: EndpointConfig,
    parallelism: int = 4,
) -> list[RawAnswer]:
    """Execute every plan, union the answers, dedupe by term value.

    The earliest (lowest-rank) occurrence of a value wins; a class-bearing
    row at the same rank upgrades a classless one.  Boolean (ASK) plan sets
    yield the single verdict of the highest-ranked plan that succeeded.
    Per-plan failures are logged and tolerated unless every plan failed.
    """
    if not plans:
        raise ValueError("plans must be nonempty")

    def run(plan: QueryPlan):
        if plan.form == ASK:
            return execute_ask(cfg, plan.sparql)
        return execute_select(cfg, plan.sparql)

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        futures = [(plan, pool.submit(run, plan)) for plan in plans]
        outcomes = []
        failures = []
        for plan, future in futures:
            try:
                outcomes.append((plan, future.result()))
            except Exception as exc:
                failures.append((plan.rank, exc))
                logger.warning("plan %d failed: %s", plan.rank, exc)

    if not outcomes:
        raise AllPlansFailed(
            "; ".join(f"rank {rank}: {exc}" for rank, exc in failures)
        )

    ask_outcomes = sorted(
        ((p.rank, r) for p, r in outcomes if p.form == ASK), key=lambda x: x[0]
    )
    if ask_outcomes:
        rank, verdict = ask_outcomes[0]
        term = RDFTerm.literal("true" if verdict else "false", datatype=XSD_BOOLEAN)
        return [RawAnswer(term=term, class_type=None, source_rank=rank)]

    merged: dict[str, RawAnswer] = {}
    for plan, table in sorted(outcomes, key=lambda pair: pair[0].rank):
        for row in table.rows:
            term = row.get((plan.main_var or "?").lstrip("?"))
            if term is None:
                continue
            class_term = row.get("c")
            class_type = (
                class_term.value
                if class_term is not None and class_term.kind == "iri"
                else None
            )
            existing = merged.get(term.value)
            if existing is None:
                merged[term.value] = RawAnswer(term, class_type, plan.rank)
            elif (
                existing.source_rank == plan.rank
                and existing.class_type is None
                and class_type is not None
            ):
                merged[term.value] = RawAnswer(existing.term, class_type, plan.rank)
    return list(merged.values())


def _datatype_family(data_type: str) -> frozenset[str]:
    if data_type == "date":
        return DATE_DATATYPES
    if data_type == "numeric":
        return NUMERIC_DATATYPES
    return frozenset((XSD_BOOLEAN,))


def filter_answers(
    raw: list[RawAnswer],
    prediction,
    store: EmbeddingStore,
    tau: float = 0.5,
) -> AnswerSet:
    """Percolate answers through the predicted answer type."""
    result = AnswerSet()
    kept_untyped = 0
    dropped_typed = 0
    for answer in raw:
        if prediction.data_type in ("date", "numeric", "boolean"):
            family = _datatype_family(prediction.data_type)
            if answer.term.kind == "literal" and answer.term.datatype in family:
                result.answers.append(answer)
            else:
                result.dropped.append((answer, DTYPE_MISMATCH))
            continue
        # string answers: match class type against predicted semantic type
        if prediction.semantic_type is None or answer.class_type is None:
            if answer.class_type is None:
                kept_untyped += 1
            result.answers.append(answer)
            continue
        class_words = split_words(local_name(answer.class_type))
        score = affinity(prediction.semantic_type, class_words, store) if class_words else 0.0
        if score >= tau:
            result.answers.append(answer)
        else:
            dropped_typed += 1
            result.dropped.append((answer, STYPE_MISMATCH))
    result.diagnostics = {
        "kept_untyped": kept_untyped,
        "dropped_typed_mismatch": dropped_typed,
    }
    return result


# --- metrics -----------------------------------------------------------------


def evaluate(predicted: set[str], gold: set[str]) -> tuple[float, float, float]:
    """Precision, recall, F1 over answer sets.

    Empty gold scores (1, 1, 1) against an empty prediction and (0, 0, 0)
    otherwise; an empty prediction against nonempty gold scores all zeros.
    """
    if not gold:
        return (1.0, 1.0, 1.0) if not predicted else (0.0, 0.0, 0.0)
    if not predicted:
        return (0.0, 0.0, 0.0)
    hits = len(predicted & gold)
    precision = hits / len(predicted)
    recall = hits / len(gold)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return (precision, recall, f1)


def macro_f1(per_question: list[tuple[float, float, float]]) -> dict:
    """Unweighted means over per-question (P, R, F1) triples."""
    if not per_question:
        return {"p": 0.0, "r": 0.0, "f1": 0.0}
    count = len(per_question)
    return {
        "p": sum(q[0] for q in per_question) / count,
        "r": sum(q[1] for q in per_question) / count,
        "f1": sum(q[2] for q in per_question) / count,
    }


# --- benchmark file ------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkItem:
    question: str
    answers: frozenset[str]
    data_type: str | None = None


def load_benchmark(path: str) -> list[BenchmarkItem]:
    """Benchmark format: JSON array of {question, answers, data_type?}."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedBenchmark(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, list) or not data:
        raise MalformedBenchmark("benchmark must be a nonempty JSON array", line=1)
    items = []
    for index, entry in enumerate(data):
        if not isinstance(entry, dict) or "question" not in entry or "answers" not in entry:
            raise MalformedBenchmark(
                f"entry {index} must be an object with question and answers keys"
            )
        if not isinstance(entry["answers"], list):
            raise MalformedBenchmark(f"entry {index}: answers must be a list")
        items.append(
            BenchmarkItem(
                question=entry["question"],
                answers=frozenset(str(a) for a in entry["answers"]),
                data_type=entry.get("data_type"),
            )
        )
    return items


def answer_strings(answers: list[RawAnswer]) -> set[str]:
    return {a.term.value for a in answers}
