"""Question graphs.

A question is first represented as phrase triple patterns extracted from its
text, then merged into an undirected phrase graph pattern (PGP) whose nodes
are entities or unknowns and whose edges are relation phrases.  Linking fills
the ``relevant_vertices`` / ``relevant_predicates`` annotations, turning the
PGP into an annotated graph pattern (AGP).  A BGP is one concrete assignment
of graph IRIs over an AGP.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .errors import DisconnectedGraph, EmptyInput, GraphError, NoUnknown

ENTITY = "entity"
VARIABLE = "variable"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class PhraseTerm:
    """One endpoint of a phrase triple: a question phrase or an unknown."""

    label: str
    category: str  # "entity" | "variable"
    var_id: int | None = None

    def __post_init__(self):
        if self.category == ENTITY:
            if not self.label:
                raise GraphError("entity term requires a nonempty label")
            if self.var_id is not None:
                raise GraphError("entity term must not carry a var_id")
        elif self.category == VARIABLE:
            if self.var_id is None or self.var_id < 1:
                raise GraphError("variable term requires var_id >= 1")
        else:
            raise GraphError(f"unknown term category: {self.category!r}")

    @property
    def is_variable(self) -> bool:
        return self.category == VARIABLE

    @staticmethod
    def entity(label: str) -> "PhraseTerm":
        return PhraseTerm(label=label, category=ENTITY)

    @staticmethod
    def variable(var_id: int, label: str = "") -> "PhraseTerm":
        return PhraseTerm(label=label, category=VARIABLE, var_id=var_id)


@dataclass(frozen=True)
class PhraseTriplePattern:
    subject: PhraseTerm
    relation_label: str
    object: PhraseTerm

    def __post_init__(self):
        if not self.relation_label:
            raise GraphError("relation label must be nonempty")
        if (
            self.subject.is_variable
            and self.object.is_variable
            and self.subject.var_id == self.object.var_id
        ):
            raise GraphError("a triple cannot relate a variable to itself")


@dataclass(frozen=True)
class RelevantVertex:
    """A graph vertex matching a node label, with its affinity score."""

    iri: str
    description: str
    score: float


@dataclass(frozen=True)
class RelevantPredicate:
    """A graph predicate matching an edge label.

    ``anchor_vertex`` is the relevant vertex whose probe discovered the
    predicate; ``object_flag`` is True when that vertex appeared as the
    object of the probed triple (incoming direction).
    """

    iri: str
    description: str
    score: float
    anchor_vertex: str
    object_flag: bool


@dataclass(frozen=True)
class PGPNode:
    id: str
    label: str
    kind: str  # "entity" | "unknown"
    is_main: bool = False
    relevant_vertices: tuple[RelevantVertex, ...] = ()
    var_id: int | None = None

    def __post_init__(self):
        if self.kind not in (ENTITY, UNKNOWN):
            raise GraphError(f"unknown node kind: {self.kind!r}")
        if self.is_main and self.kind != UNKNOWN:
            raise GraphError("only an unknown node can be the main unknown")
        if self.kind == UNKNOWN and self.var_id is None:
            raise GraphError("unknown node requires a var_id")


@dataclass(frozen=True)
class PGPEdge:
    id: str
    label: str
    endpoint_a: str
    endpoint_b: str
    relevant_predicates: tuple[RelevantPredicate, ...] = ()

    def __post_init__(self):
        if self.endpoint_a == self.endpoint_b:
            raise GraphError("edge endpoints must be distinct nodes")


@dataclass(frozen=True)
class AnswerTypePrediction:
    data_type: str  # "date" | "numeric" | "boolean" | "string"
    semantic_type: str | None = None

    def __post_init__(self):
        if self.data_type not in ("date", "numeric", "boolean", "string"):
            raise GraphError(f"unknown data type: {self.data_type!r}")
        if self.semantic_type is not None and self.data_type != "string":
            raise GraphError("semantic type only accompanies string answers")


@dataclass(frozen=True)
class PGP:
    nodes: tuple[PGPNode, ...]
    edges: tuple[PGPEdge, ...]
    prediction: AnswerTypePrediction | None = None
    boolean_flagged: bool = False

    def node(self, node_id: str) -> PGPNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    @property
    def main_unknown(self) -> PGPNode | None:
        for n in self.nodes:
            if n.is_main:
                return n
        return None

    @property
    def unknowns(self) -> tuple[PGPNode, ...]:
        return tuple(n for n in self.nodes if n.kind == UNKNOWN)

    def with_prediction(self, prediction: AnswerTypePrediction) -> "PGP":
        return replace(self, prediction=prediction)


@dataclass(frozen=True)
class BGPTriple:
    """One concrete SPARQL triple pattern plus its component scores.

    Subject/object are absolute IRIs or ``?``-prefixed variable names.  The
    score components feed the BGP ranking; they are not serialized.
    """

    subject: str
    predicate: str
    object: str
    s_subject: float = 0.0
    s_predicate: float = 0.0
    s_object: float = 0.0
    edge_id: str = ""


@dataclass(frozen=True)
class BGP:
    triples: tuple[BGPTriple, ...]
    score: float


def _node_id(term: PhraseTerm) -> str:
    if term.is_variable:
        return f"var:{term.var_id}"
    return f"entity:{term.label}"


def build_pgp(
    patterns: Sequence[PhraseTriplePattern],
    boolean_flagged: bool = False,
) -> PGP:
    """Merge phrase triple patterns into a connected, undirected PGP.

    Nodes merge by exact entity label or by var_id.  The variable with the
    lowest var_id becomes the main unknown; all other unknowns are
    intermediates.  Raises EmptyInput, DisconnectedGraph, or NoUnknown
    (the latter only when ``boolean_flagged`` is False).
    """
    if not patterns:
        raise EmptyInput("no phrase triple patterns")

    node_order: list[str] = []
    terms: dict[str, PhraseTerm] = {}
    for p in patterns:
        for term in (p.subject, p.object):
            key = _node_id(term)
            if key not in terms:
                terms[key] = term
                node_order.append(key)

    var_ids = sorted(
        t.var_id for t in terms.values() if t.is_variable and t.var_id is not None
    )
    if not var_ids and not boolean_flagged:
        raise NoUnknown("no variable term and the question is not boolean-flagged")
    main_id = var_ids[0] if var_ids else None

    nodes = []
    for key in node_order:
        term = terms[key]
        if term.is_variable:
            nodes.append(
                PGPNode(
                    id=key,
                    label=term.label,
                    kind=UNKNOWN,
                    is_main=term.var_id == main_id,
                    var_id=term.var_id,
                )
            )
        else:
            nodes.append(PGPNode(id=key, label=term.label, kind=ENTITY))

    edges = [
        PGPEdge(
            id=f"edge:{i}",
            label=p.relation_label,
            endpoint_a=_node_id(p.subject),
            endpoint_b=_node_id(p.object),
        )
        for i, p in enumerate(patterns)
    ]

    pgp = PGP(nodes=tuple(nodes), edges=tuple(edges), boolean_flagged=boolean_flagged)
    if not _connected(pgp):
        raise DisconnectedGraph("patterns form two or more components")
    return pgp


def _connected(pgp: PGP) -> bool:
    if not pgp.nodes:
        return False
    adjacency: dict[str, set[str]] = {n.id: set() for n in pgp.nodes}
    for e in pgp.edges:
        adjacency[e.endpoint_a].add(e.endpoint_b)
        adjacency[e.endpoint_b].add(e.endpoint_a)
    seen = {pgp.nodes[0].id}
    stack = [pgp.nodes[0].id]
    while stack:
        for neighbor in adjacency[stack.pop()]:
            if neighbor not in seen:
                seen.add(neighbor)
                stack.append(neighbor)
    return len(seen) == len(pgp.nodes)


class Shape(str, Enum):
    STAR = "star"
    PATH = "path"
    OTHER = "other"


def classify_shape(pgp: PGP) -> Shape:
    """Star when all edges share one node; path when they form a chain."""
    if not pgp.edges:
        return Shape.OTHER
    shared = set.intersection(
        *[{e.endpoint_a, e.endpoint_b} for e in pgp.edges]
    )
    if shared:
        return Shape.STAR
    degree: dict[str, int] = {n.id: 0 for n in pgp.nodes}
    for e in pgp.edges:
        degree[e.endpoint_a] += 1
        degree[e.endpoint_b] += 1
    counts = sorted(degree.values())
    is_chain = (
        len(pgp.edges) >= 2
        and len(pgp.edges) == len(pgp.nodes) - 1
        and counts[:2] == [1, 1]
        and all(d == 2 for d in counts[2:])
    )
    return Shape.PATH if is_chain else Shape.OTHER


def pgp_to_patterns(pgp: PGP) -> list[PhraseTriplePattern]:
    """Decompose a PGP back into one phrase triple pattern per edge."""

    def term_of(node: PGPNode) -> PhraseTerm:
        if node.kind == UNKNOWN:
            return PhraseTerm.variable(node.var_id or 0, node.label)
        return PhraseTerm.entity(node.label)

    return [
        PhraseTriplePattern(
            subject=term_of(pgp.node(e.endpoint_a)),
            relation_label=e.label,
            object=term_of(pgp.node(e.endpoint_b)),
        )
        for e in pgp.edges
    ]


# --- canonical JSON ----------------------------------------------------------


def prediction_to_dict(p: AnswerTypePrediction | None) -> dict | None:
    if p is None:
        return None
    return {"data_type": p.data_type, "semantic_type": p.semantic_type}


def pgp_to_dict(pgp: PGP) -> dict:
    return {
        "nodes": [
            {
                "id": n.id,
                "label": n.label,
                "kind": n.kind,
                "is_main": n.is_main,
                "var_id": n.var_id,
                "relevant_vertices": [
                    {"iri": v.iri, "description": v.description, "score": v.score}
                    for v in n.relevant_vertices
                ],
            }
            for n in sorted(pgp.nodes, key=lambda n: n.id)
        ],
        "edges": [
            {
                "id": e.id,
                "label": e.label,
                "endpoint_a": e.endpoint_a,
                "endpoint_b": e.endpoint_b,
                "relevant_predicates": [
                    {
                        "iri": p.iri,
                        "description": p.description,
                        "score": p.score,
                        "anchor_vertex": p.anchor_vertex,
                        "object_flag": p.object_flag,
                    }
                    for p in e.relevant_predicates
                ],
            }
            for e in sorted(pgp.edges, key=lambda e: e.id)
        ],
        "prediction": prediction_to_dict(pgp.prediction),
        "boolean_flagged": pgp.boolean_flagged,
    }


def pgp_from_dict(data: dict) -> PGP:
    nodes = tuple(
        PGPNode(
            id=n["id"],
            label=n["label"],
            kind=n["kind"],
            is_main=n["is_main"],
            var_id=n.get("var_id"),
            relevant_vertices=tuple(
                RelevantVertex(v["iri"], v["description"], v["score"])
                for v in n.get("relevant_vertices", [])
            ),
        )
        for n in data["nodes"]
    )
    edges = tuple(
        PGPEdge(
            id=e["id"],
            label=e["label"],
            endpoint_a=e["endpoint_a"],
            endpoint_b=e["endpoint_b"],
            relevant_predicates=tuple(
                RelevantPredicate(
                    p["iri"],
                    p["description"],
                    p["score"],
                    p["anchor_vertex"],
                    p["object_flag"],
                )
                for p in e.get("relevant_predicates", [])
            ),
        )
        for e in data["edges"]
    )
    prediction = None
    if data.get("prediction"):
        prediction = AnswerTypePrediction(
            data_type=data["prediction"]["data_type"],
            semantic_type=data["prediction"].get("semantic_type"),
        )
    return PGP(
        nodes=nodes,
        edges=edges,
        prediction=prediction,
        boolean_flagged=data.get("boolean_flagged", False),
    )


def bgp_to_dict(bgp: BGP) -> dict:
    return {
        "triples": [
            {"subject": t.subject, "predicate": t.predicate, "object": t.object}
            for t in bgp.triples
        ],
        "score": bgp.score,
    }
