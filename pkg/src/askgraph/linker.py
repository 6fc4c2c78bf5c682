"""Just-in-time linking of a PGP against a live SPARQL endpoint.

Entity linking fetches candidate vertices with a full-text containment probe
and ranks them by semantic affinity; relation linking probes only the
predicates attached to the already-linked vertices (both directions, since
the question graph is undirected) and ranks them the same way.  No index or
preprocessing of the target graph is ever built.
"""

from __future__ import annotations

import json
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .errors import EndpointError, NoAnchorVertices
from .graph import PGP, PGPEdge, PGPNode, RelevantPredicate, RelevantVertex, UNKNOWN
from .sparql import (
    GENERIC_REGEX,
    EndpointConfig,
    contains_dialect,
    execute_select,
    mark_contains_unsupported,
    render_contains,
)

logger = logging.getLogger("askgraph.probes")

XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"


@dataclass(frozen=True)
class LinkerParams:
    max_fetched_vertices: int = 400   # maxVR
    vertices_per_node: int = 1        # k_v
    predicates_per_edge: int = 20     # k_p
    predicates_per_vertex_limit: int = 100

    def __post_init__(self):
        values = (
            self.max_fetched_vertices,
            self.vertices_per_node,
            self.predicates_per_edge,
            self.predicates_per_vertex_limit,
        )
        if any(v < 1 for v in values):
            raise ValueError("linker parameters must be positive")
        if self.vertices_per_node > self.max_fetched_vertices:
            raise ValueError("vertices_per_node cannot exceed max_fetched_vertices")


@dataclass
class ProbeRecord:
    kind: str          # "vertices" | "outgoing" | "incoming" | "description"
    target: str        # node label or anchor/predicate IRI
    rows: int
    duration: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "target": self.target,
                "rows": self.rows,
                "duration": round(self.duration, 6),
            }
        )


@dataclass
class ProbeLog:
    """Structured probe trail: one JSON line per endpoint probe."""

    records: list[ProbeRecord] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    def record(self, kind: str, target: str, rows: int, duration: float) -> None:
        record = ProbeRecord(kind, target, rows, duration)
        self.records.append(record)
        logger.debug("%s", record.to_json())

    def diagnose(self, message: str) -> None:
        self.diagnostics.append(message)
        logger.debug("%s", json.dumps({"diagnostic": message}))

    def to_jsonl(self) -> str:
        return "\n".join(r.to_json() for r in self.records)


# --- IRI helpers ---------------------------------------------------------------


def local_name(iri: str) -> str:
    return re.split(r"[/#]", iri.rstrip("/#"))[-1]


def split_words(name: str) -> str:
    """camelCase / snake_case / kebab-case local name to space-joined words."""
    spaced = re.sub(r"([a-z0-9])([A-Z])", r"\1 \2", name)
    spaced = re.sub(r"([A-Z]+)([A-Z][a-z])", r"\1 \2", spaced)
    return " ".join(spaced.replace("_", " ").replace("-", " ").split()).lower()


def is_human_readable(iri: str) -> bool:
    """True when the local name reads as words, not an internal identifier."""
    name = local_name(iri)
    if not re.search(r"[A-Za-z]{3,}", name):
        return False
    return re.fullmatch(r"[A-Za-z]{0,2}[0-9]+", name) is None


def _is_string_literal(term) -> bool:
    return (
        term.kind == "literal"
        and term.datatype in (None, XSD_STRING)
        and (term.lang is None or term.lang.lower().startswith("en"))
    )


# --- entity linking (Algorithm 1) ------------------------------------------------


def _contains_select(cfg: EndpointConfig, label: str, limit: int) -> list:
    keywords = [w for w in label.split() if w.replace('"', "")]
    dialect = contains_dialect(cfg)
    query = (
        "SELECT DISTINCT ?v ?d_v WHERE { ?v ?p ?d_v . "
        f"{render_contains(dialect, 'd_v', keywords)} . }} LIMIT {limit}"
    )
    try:
        return execute_select(cfg, query).rows
    except EndpointError:
        if dialect == GENERIC_REGEX:
            raise
        # endpoint rejected the native full-text syntax; downgrade once
        mark_contains_unsupported(cfg)
        query = (
            "SELECT DISTINCT ?v ?d_v WHERE { ?v ?p ?d_v . "
            f"{render_contains(GENERIC_REGEX, 'd_v', keywords)} . }} LIMIT {limit}"
        )
        return execute_select(cfg, query).rows


def potential_relevant_vertices(
    label: str,
    cfg: EndpointConfig,
    max_vr: int = 400,
    log: ProbeLog | None = None,
) -> list[tuple[str, str]]:
    """Fetch up to maxVR (vertex, description) pairs whose description
    contains any word of the label; descriptions restricted to string
    literals client-side."""
    started = time.perf_counter()
    rows = _contains_select(cfg, label, max_vr)
    pairs: list[tuple[str, str]] = []
    seen = set()
    for row in rows:
        vertex, description = row.get("v"), row.get("d_v")
        if vertex is None or description is None:
            continue
        if vertex.kind != "iri" or not _is_string_literal(description):
            continue
        pair = (vertex.value, description.value)
        if pair not in seen:
            seen.add(pair)
            pairs.append(pair)
    if log is not None:
        log.record("vertices", label, len(pairs), time.perf_counter() - started)
    return pairs


def link_entity(
    node: PGPNode,
    cfg: EndpointConfig,
    params: LinkerParams,
    scorer,
    log: ProbeLog | None = None,
) -> list[RelevantVertex]:
    """Top-k vertices for an entity node; unknowns link to nothing."""
    if node.kind == UNKNOWN:
        return []
    candidates = potential_relevant_vertices(
        node.label, cfg, params.max_fetched_vertices, log
    )
    scored = [
        RelevantVertex(iri=iri, description=description, score=scorer(node.label, description))
        for iri, description in candidates
    ]
    scored.sort(key=lambda v: (-v.score, v.iri))
    best: list[RelevantVertex] = []
    taken = set()
    for vertex in scored:  # one entry per vertex, best description wins
        if vertex.iri not in taken:
            taken.add(vertex.iri)
            best.append(vertex)
        if len(best) == params.vertices_per_node:
            break
    return best


# --- relation linking (Algorithm 2) ----------------------------------------------


def _predicate_probe(
    cfg: EndpointConfig, anchor: str, incoming: bool, limit: int
) -> list[str]:
    pattern = f"?sub ?p <{anchor}>" if incoming else f"<{anchor}> ?p ?obj"
    query = f"SELECT DISTINCT ?p WHERE {{ {pattern} . }} LIMIT {limit}"
    rows = execute_select(cfg, query).rows
    return [row["p"].value for row in rows if "p" in row and row["p"].kind == "iri"]


def resolve_predicate_description(
    p: str,
    cfg: EndpointConfig,
    log: ProbeLog | None = None,
) -> str:
    """Human-readable description of a predicate.

    Readable IRIs describe themselves via their local name; cryptic ones
    (wdg:P227 style) are resolved by querying the endpoint for an attached
    string literal, preferring label-style predicates, then the shortest.
    """
    name = local_name(p)
    if is_human_readable(p):
        return split_words(name)
    started = time.perf_counter()
    query = f"SELECT DISTINCT ?lp ?d WHERE {{ <{p}> ?lp ?d . }} LIMIT 50"
    try:
        rows = execute_select(cfg, query).rows
    except Exception:
        rows = []
    candidates = [
        (row["lp"].value, row["d"].value)
        for row in rows
        if "lp" in row and "d" in row and _is_string_literal(row["d"])
    ]
    if log is not None:
        log.record("description", p, len(candidates), time.perf_counter() - started)
    for predicate_iri, text in candidates:
        if re.search(r"label|name", local_name(predicate_iri), re.IGNORECASE):
            return text
    if candidates:
        return min(candidates, key=lambda c: (len(c[1]), c[1]))[1]
    return name


def link_relation(
    pgp: PGP,
    edge: PGPEdge,
    cfg: EndpointConfig,
    params: LinkerParams,
    scorer,
    log: ProbeLog | None = None,
) -> list[RelevantPredicate]:
    """Top-k predicates for an edge, probed only around the endpoints'
    relevant vertices (never the whole graph)."""
    node_a = pgp.node(edge.endpoint_a)
    node_b = pgp.node(edge.endpoint_b)
    anchors: list[str] = []
    for node in (node_a, node_b):
        for vertex in node.relevant_vertices:
            if vertex.iri not in anchors:
                anchors.append(vertex.iri)
    if not anchors:
        raise NoAnchorVertices(
            f"edge {edge.label!r}: no linked vertex on either endpoint"
        )

    limit = params.predicates_per_vertex_limit
    probes = [(anchor, incoming) for anchor in anchors for incoming in (False, True)]
    with ThreadPoolExecutor(max_workers=min(8, len(probes))) as pool:
        futures = [
            (anchor, incoming, time.perf_counter(),
             pool.submit(_predicate_probe, cfg, anchor, incoming, limit))
            for anchor, incoming in probes
        ]
        discovered: list[tuple[str, str, bool]] = []
        for anchor, incoming, started, future in futures:
            predicates = future.result()
            if log is not None:
                log.record(
                    "incoming" if incoming else "outgoing",
                    anchor,
                    len(predicates),
                    time.perf_counter() - started,
                )
            discovered.extend((p, anchor, incoming) for p in predicates)

    descriptions: dict[str, str] = {}
    candidates: list[RelevantPredicate] = []
    seen: set[str] = set()
    for predicate, anchor, incoming in discovered:
        if predicate in seen:  # same score everywhere; keep first occurrence
            continue
        seen.add(predicate)
        if predicate not in descriptions:
            descriptions[predicate] = resolve_predicate_description(predicate, cfg, log)
        description = descriptions[predicate]
        candidates.append(
            RelevantPredicate(
                iri=predicate,
                description=description,
                score=scorer(edge.label, description),
                anchor_vertex=anchor,
                object_flag=incoming,
            )
        )
    candidates.sort(key=lambda p: (-p.score, p.iri))
    return candidates[: params.predicates_per_edge]


# --- full annotation -------------------------------------------------------------


def annotate(
    pgp: PGP,
    cfg: EndpointConfig,
    params: LinkerParams,
    scorer,
    log: ProbeLog | None = None,
) -> PGP:
    """Link every node then every edge, returning the annotated graph.

    Per-element misses are diagnostics, not failures; the call fails only
    when no edge could be anchored at all.
    """
    log = log if log is not None else ProbeLog()
    started = time.perf_counter()
    nodes = []
    for node in pgp.nodes:
        vertices = link_entity(node, cfg, params, scorer, log)
        if node.kind != UNKNOWN and not vertices:
            log.diagnose(f"no vertex candidates for entity {node.label!r}")
        nodes.append(replace(node, relevant_vertices=tuple(vertices)))
    log.timings["entity_linking"] = time.perf_counter() - started

    annotated = replace(pgp, nodes=tuple(nodes))
    started = time.perf_counter()
    edges = []
    anchored = 0
    for edge in annotated.edges:
        try:
            predicates = link_relation(annotated, edge, cfg, params, scorer, log)
            anchored += 1
        except NoAnchorVertices as exc:
            log.diagnose(str(exc))
            predicates = []
        edges.append(replace(edge, relevant_predicates=tuple(predicates)))
    log.timings["relation_linking"] = time.perf_counter() - started

    if annotated.edges and anchored == 0:
        raise NoAnchorVertices("no edge could be anchored to any vertex")
    return replace(annotated, edges=tuple(edges))
