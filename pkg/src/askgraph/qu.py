"""Question understanding.

Turns an English question into phrase triple patterns plus an answer-type
prediction.  Two providers are supported: a remote seq2seq model spoken to
over a small HTTP contract, and a deterministic offline extractor driven by
a rule table over question-word frames.  The offline extractor exists so the
whole pipeline runs and tests without any trained model; it handles the
question frames documented below, not open English.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import requests

from .errors import (
    GraphError,
    MalformedModelOutput,
    NoPatternsExtracted,
    ProviderUnavailable,
)
from .graph import AnswerTypePrediction, PhraseTerm, PhraseTriplePattern

REMOTE_MODEL = "remote_model"
OFFLINE_EXTRACTOR = "offline_extractor"


@dataclass(frozen=True)
class QUProviderConfig:
    kind: str = OFFLINE_EXTRACTOR
    endpoint_url: str | None = None
    timeout: float = 15.0

    def __post_init__(self):
        if self.kind not in (REMOTE_MODEL, OFFLINE_EXTRACTOR):
            raise ValueError(f"unknown QU provider kind: {self.kind!r}")
        if (self.kind == REMOTE_MODEL) != (self.endpoint_url is not None):
            raise ValueError("endpoint_url is required iff kind is remote_model")


# --- pattern text codec ------------------------------------------------------
#
# Grammar (bit-exact): triples joined by " | "; each triple is
# "[e1] <termA> [r] <label> [e2] <termB>"; variables render as "var:<id>".
# Labels are raw UTF-8 with "[" forbidden, so every "[" starts a marker.
# Entity labels that themselves match var:<digits> would be ambiguous and
# are outside the valid space.

_MARKERS = ("[e1] ", "[r] ", "[e2] ")
_VAR_RE = re.compile(r"^var:(\d+)$")


def _render_term(term: PhraseTerm) -> str:
    if term.is_variable:
        return f"var:{term.var_id}"
    return term.label


def encode_patterns(patterns: list[PhraseTriplePattern]) -> str:
    parts = []
    for p in patterns:
        parts.append(
            f"[e1] {_render_term(p.subject)} [r] {p.relation_label}"
            f" [e2] {_render_term(p.object)}"
        )
    return " | ".join(parts)


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def parse_model_output(text: str) -> list[PhraseTriplePattern]:
    """Total inverse of :func:`encode_patterns` on valid pattern lists."""
    pos = 0
    n = len(text)
    patterns: list[PhraseTriplePattern] = []

    def fail(message: str, at: int) -> MalformedModelOutput:
        return MalformedModelOutput(message, _byte_offset(text, at))

    def parse_term(raw: str, at: int) -> PhraseTerm:
        m = _VAR_RE.match(raw)
        if m:
            var_id = int(m.group(1))
            if var_id < 1:
                raise fail("variable id must be >= 1", at)
            return PhraseTerm.variable(var_id)
        if not raw:
            raise fail("empty term label", at)
        return PhraseTerm.entity(raw)

    while pos < n:
        fields = []
        for marker in _MARKERS:
            if not text.startswith(marker, pos):
                raise fail(f"expected {marker.strip()!r}", pos)
            pos += len(marker)
            start = pos
            next_bracket = text.find("[", pos)
            if marker != "[e2] ":
                if next_bracket == -1:
                    raise fail("truncated triple", n)
                # markers are space-separated from the preceding content
                content = text[start:next_bracket]
                if not content.endswith(" "):
                    raise fail("missing space before marker", next_bracket)
                content = content[:-1]
                pos = next_bracket
            else:
                if next_bracket == -1:
                    content = text[start:]
                    pos = n
                else:
                    content = text[start:next_bracket]
                    if not content.endswith(" | "):
                        raise fail("expected ' | ' triple separator", next_bracket)
                    content = content[: -len(" | ")]
                    pos = next_bracket
            if not content:
                raise fail("empty term or relation label", start)
            fields.append((content, start))

        (term_a, at_a), (relation, at_r), (term_b, at_b) = fields
        try:
            patterns.append(
                PhraseTriplePattern(
                    subject=parse_term(term_a, at_a),
                    relation_label=relation,
                    object=parse_term(term_b, at_b),
                )
            )
        except GraphError as exc:
            raise fail(str(exc), at_a)

    if not patterns:
        raise MalformedModelOutput("no triples in model output", 0)
    return patterns


# --- rule tables -------------------------------------------------------------

AUXILIARY_VERBS = {"is", "are", "was", "were", "did", "does", "do"}
_EXTRA_AUX = {"has", "have", "had", "can", "could", "will", "would"}
_ARTICLES = {"the", "a", "an"}
_FUNCTION_WORDS = {
    "of", "as", "one", "in", "into", "which", "that", "to", "for",
    "from", "by", "with", "at", "whose", "is", "are", "was", "were",
}
_WH_WORDS = {
    "who", "whom", "what", "which", "where", "when", "whose", "how",
    "name", "give", "list", "show", "tell",
}
# question words whose following noun names the expected answer type
_TYPE_BEARING_WH = {"which", "what", "name", "give", "list", "show"}
_LEADING_PREPOSITIONS = {"in", "on", "at", "since", "for"}
_STYPE_SKIP = _ARTICLES | AUXILIARY_VERBS | {"of", "many", "much", "me", "us"}


def predict_data_type(question: str) -> str:
    """Classify the expected answer data type from the question opening.

    Rule table: when / what year / what date -> date; how many / how much /
    count -> numeric; a leading auxiliary verb -> boolean; anything else
    falls back to string.
    """
    tokens = [t.lower() for t in re.findall(r"[A-Za-z0-9']+", question)]
    while tokens and tokens[0] in _LEADING_PREPOSITIONS:
        tokens = tokens[1:]
    if not tokens:
        return "string"
    first, second = tokens[0], tokens[1] if len(tokens) > 1 else ""
    if first == "when" or (first in ("what", "which") and second in ("year", "date")):
        return "date"
    if (first == "how" and second in ("many", "much")) or first == "count":
        return "numeric"
    if first in AUXILIARY_VERBS:
        return "boolean"
    return "string"


def predict_semantic_type(question: str) -> str | None:
    """First noun-like token after the question word, else None.

    Heuristic stand-in for a constituency parse: skip to the first known
    question word, then return the first following token that is neither a
    stopword nor an auxiliary.
    """
    tokens = [t.lower() for t in re.findall(r"[A-Za-z0-9']+", question)]
    wh_at = next((i for i, t in enumerate(tokens) if t in _WH_WORDS), None)
    if wh_at is None:
        return None
    if tokens[wh_at] == "how" and wh_at + 1 < len(tokens):
        wh_at += 1  # "how many X"
    for token in tokens[wh_at + 1:]:
        if token in _STYPE_SKIP or token in _WH_WORDS:
            continue
        if token.isalpha():
            return token
    return None


def predict_answer_type(
    question: str, provider: QUProviderConfig | None = None
) -> AnswerTypePrediction:
    """Data type plus (for strings) semantic type.

    A remote classifier, when configured, takes precedence over the rule
    table; any failure falls back to the local rules, then to string.
    """
    data_type = None
    if provider is not None and provider.kind == REMOTE_MODEL:
        try:
            data_type = remote_data_type(question, provider)
        except ProviderUnavailable:
            data_type = None
    if data_type not in ("date", "numeric", "boolean", "string"):
        data_type = predict_data_type(question)
    semantic = predict_semantic_type(question) if data_type == "string" else None
    return AnswerTypePrediction(data_type=data_type, semantic_type=semantic)


# --- offline extractor -------------------------------------------------------

_LEMMA_SUFFIXES = (("ies", "y"), ("oes", "o"), ("ches", "ch"), ("shes", "sh"),
                   ("sses", "ss"), ("xes", "x"), ("zes", "z"), ("s", ""))


def _lemmatize_verb(word: str) -> str:
    if word.endswith("ss") or len(word) <= 3:
        return word
    for suffix, repl in _LEMMA_SUFFIXES:
        if word.endswith(suffix) and len(word) - len(suffix) >= 2:
            return word[: len(word) - len(suffix)] + repl
    return word


def _tokenize(question: str) -> list[str]:
    return re.findall(r"[A-Za-z0-9'][\w'-]*", question)


def _entity_spans(tokens: list[str]) -> list[tuple[int, int]]:
    """Maximal runs of capitalized tokens, excluding the sentence opener."""
    spans = []
    i = 0
    while i < len(tokens):
        if i > 0 and tokens[i][0].isupper():
            j = i
            while j < len(tokens) and tokens[j][0].isupper():
                j += 1
            spans.append((i, j))
            i = j
        else:
            i += 1
    return spans


def _clean_relation(words: list[str]) -> str:
    words = [w for w in words if w not in _ARTICLES]
    while words and (words[0] in _FUNCTION_WORDS or words[0] in _EXTRA_AUX):
        words = words[1:]
    while words and words[-1] in _FUNCTION_WORDS:
        words = words[:-1]
    if len(words) == 1:
        words = [_lemmatize_verb(words[0])]
    return " ".join(words)


def _relation_for_clause(
    lowered: list[str],
    span: tuple[int, int],
    clause_start: int,
    wh_word: str | None,
) -> str:
    after = lowered[span[1]:]
    label = _clean_relation(after)
    if label:
        return label
    frame_words = _WH_WORDS | AUXILIARY_VERBS | _EXTRA_AUX | {"many", "much"}
    before = [w for w in lowered[clause_start:span[0]] if w not in frame_words]
    label = _clean_relation(before)
    words = label.split()
    if len(words) > 1 and wh_word in _TYPE_BEARING_WH:
        # the leading noun names the answer type, not the relation
        label = " ".join(words[1:])
    if not label:
        # last resort: the raw span between entity and clause start
        label = " ".join(w for w in lowered[clause_start:span[0]] if w not in _ARTICLES)
    return label


def offline_extract(question: str) -> list[PhraseTriplePattern]:
    """Rule-table extraction of phrase triple patterns.

    Frames handled: wh/imperative questions with one unknown, optionally a
    conjunction of two entity clauses; boolean questions opening with an
    auxiliary verb and relating two entities.  All emitted labels are
    contiguous phrases of the question up to article removal and verb
    lemmatization.
    """
    tokens = _tokenize(question)
    if not tokens:
        raise NoPatternsExtracted("empty question")
    lowered = [t.lower() for t in tokens]
    spans = _entity_spans(tokens)

    def entity_at(span: tuple[int, int]) -> PhraseTerm:
        return PhraseTerm.entity(" ".join(tokens[span[0]:span[1]]))

    if lowered[0] in AUXILIARY_VERBS and len(spans) >= 2:
        first, second = spans[0], spans[1]
        relation = _clean_relation(lowered[first[1]:second[0]])
        if not relation:
            relation = " ".join(
                w for w in lowered[first[1]:second[0]] if w not in _ARTICLES
            )
        if not relation:
            raise NoPatternsExtracted("no relation phrase between entities")
        return [
            PhraseTriplePattern(
                subject=entity_at(first),
                relation_label=relation,
                object=entity_at(second),
            )
        ]

    if not spans:
        raise NoPatternsExtracted("no entity phrase found")

    wh_word = next((w for w in lowered if w in _WH_WORDS), None)
    unknown = PhraseTerm.variable(1)

    # split into clauses on "and" tokens that separate entity-bearing segments
    clauses: list[tuple[int, int]] = []
    start = 0
    for i, word in enumerate(lowered):
        if word == "and":
            left = [s for s in spans if start <= s[0] and s[1] <= i]
            right = [s for s in spans if s[0] > i]
            if left and right:
                clauses.append((start, i))
                start = i + 1
    clauses.append((start, len(tokens)))

    patterns = []
    for clause_start, clause_end in clauses:
        in_clause = [s for s in spans if clause_start <= s[0] and s[1] <= clause_end]
        if not in_clause:
            continue
        span = in_clause[0]
        relation = _relation_for_clause(
            lowered[:clause_end], span, clause_start, wh_word
        )
        if not relation:
            continue
        patterns.append(
            PhraseTriplePattern(
                subject=unknown, relation_label=relation, object=entity_at(span)
            )
        )
    if not patterns:
        raise NoPatternsExtracted("no triple patterns recognized")
    return patterns


# --- remote provider ---------------------------------------------------------


def _term_from_wire(data: dict) -> PhraseTerm:
    return PhraseTerm(
        label=data.get("label", ""),
        category=data["category"],
        var_id=data.get("var_id"),
    )


def remote_extract(question: str, provider: QUProviderConfig) -> list[PhraseTriplePattern]:
    try:
        response = requests.post(
            f"{provider.endpoint_url}/extract",
            json={"question": question},
            timeout=provider.timeout,
        )
        response.raise_for_status()
        payload = response.json()
    except (requests.RequestException, ValueError) as exc:
        raise ProviderUnavailable(f"QU model unreachable: {exc}") from exc
    try:
        patterns = [
            PhraseTriplePattern(
                subject=_term_from_wire(item["subject"]),
                relation_label=item["relation"],
                object=_term_from_wire(item["object"]),
            )
            for item in payload["patterns"]
        ]
    except (KeyError, TypeError, GraphError) as exc:
        raise ProviderUnavailable(f"QU model returned invalid payload: {exc}") from exc
    if not patterns:
        raise NoPatternsExtracted("provider returned no patterns")
    return patterns


def remote_data_type(question: str, provider: QUProviderConfig) -> str:
    try:
        response = requests.post(
            f"{provider.endpoint_url}/datatype",
            json={"question": question},
            timeout=provider.timeout,
        )
        response.raise_for_status()
        data_type = response.json()["data_type"]
    except (requests.RequestException, ValueError, KeyError) as exc:
        raise ProviderUnavailable(f"datatype classifier unreachable: {exc}") from exc
    return data_type


def extract_triple_patterns(
    question: str, provider: QUProviderConfig
) -> list[PhraseTriplePattern]:
    if not question.strip():
        raise NoPatternsExtracted("empty question")
    if provider.kind == REMOTE_MODEL:
        return remote_extract(question, provider)
    return offline_extract(question)
