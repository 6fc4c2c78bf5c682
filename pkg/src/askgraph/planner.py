"""Query planning over an annotated graph pattern.

Enumerates every assignment of relevant vertices/predicates into concrete
basic graph patterns, scores each one by the mean per-triple sum of its
component affinities, ranks them, and serializes the top-K into SPARQL.
The SELECT form carries an optional clause fetching the class type of the
main unknown, which feeds the answer post-filter.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import GraphError, NoViableBGP
from .graph import (
    BGP,
    BGPTriple,
    PGP,
    PGPEdge,
    AnswerTypePrediction,
    RelevantPredicate,
    RelevantVertex,
    UNKNOWN,
)

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
SELECT = "select"
ASK = "ask"

# above this multiple of K the planner switches to lazy best-first enumeration
LAZY_FACTOR = 10


@dataclass(frozen=True)
class QueryPlan:
    bgp: BGP
    sparql: str
    rank: int
    form: str  # "select" | "ask"
    main_var: str | None = None


def variable_names(pgp: PGP) -> dict[str, str]:
    """SPARQL variable per unknown node: the main unknown is ?unknown1,
    intermediates keep their var_id."""
    names = {}
    for node in pgp.nodes:
        if node.kind == UNKNOWN:
            number = 1 if node.is_main else node.var_id
            names[node.id] = f"?unknown{number}"
    return names


def _node_dims(agp: PGP) -> list[tuple[str, tuple[RelevantVertex, ...]]]:
    dims = []
    for node in agp.nodes:
        if node.kind == UNKNOWN:
            continue
        if not node.relevant_vertices:
            raise NoViableBGP(f"entity node {node.label!r} has no relevant vertices")
        dims.append((node.id, node.relevant_vertices))
    return dims


def _edge_dims(agp: PGP) -> list[tuple[str, tuple[RelevantPredicate, ...]]]:
    dims = []
    for edge in agp.edges:
        if not edge.relevant_predicates:
            raise NoViableBGP(f"edge {edge.label!r} has no relevant predicates")
        dims.append((edge.id, edge.relevant_predicates))
    return dims


def _assemble(
    agp: PGP,
    names: dict[str, str],
    node_choice: dict[str, RelevantVertex],
    edge_choice: dict[str, RelevantPredicate],
) -> BGP:
    triples = []
    for edge in agp.edges:
        predicate = edge_choice[edge.id]
        node_a = agp.node(edge.endpoint_a)
        node_b = agp.node(edge.endpoint_b)
        a_owns = any(
            v.iri == predicate.anchor_vertex for v in node_a.relevant_vertices
        )
        anchor_node, other_node = (node_a, node_b) if a_owns else (node_b, node_a)

        def value_and_score(node):
            if node.kind == UNKNOWN:
                return names[node.id], 0.0
            chosen = node_choice[node.id]
            return chosen.iri, chosen.score

        anchor_value, anchor_score = value_and_score(anchor_node)
        other_value, other_score = value_and_score(other_node)
        if predicate.object_flag:  # anchor appeared as object at discovery
            subject, s_subject = other_value, other_score
            obj, s_object = anchor_value, anchor_score
        else:
            subject, s_subject = anchor_value, anchor_score
            obj, s_object = other_value, other_score
        triples.append(
            BGPTriple(
                subject=subject,
                predicate=predicate.iri,
                object=obj,
                s_subject=s_subject,
                s_predicate=predicate.score,
                s_object=s_object,
                edge_id=edge.id,
            )
        )
    score = sum(t.s_subject + t.s_predicate + t.s_object for t in triples) / len(triples)
    return BGP(triples=tuple(triples), score=score)


def enumerate_bgps(agp: PGP) -> list[BGP]:
    """Full cartesian product over every node's vertices and edge's predicates."""
    if not agp.edges:
        raise NoViableBGP("annotated graph has no edges")
    names = variable_names(agp)
    node_dims = _node_dims(agp)
    edge_dims = _edge_dims(agp)

    bgps: list[BGP] = []

    def recurse(i: int, node_choice: dict, edge_choice: dict):
        if i < len(node_dims):
            key, options = node_dims[i]
            for option in options:
                node_choice[key] = option
                recurse(i + 1, node_choice, edge_choice)
            del node_choice[key]
            return
        j = i - len(node_dims)
        if j < len(edge_dims):
            key, options = edge_dims[j]
            for option in options:
                edge_choice[key] = option
                recurse(i + 1, node_choice, edge_choice)
            del edge_choice[key]
            return
        bgps.append(_assemble(agp, names, dict(node_choice), dict(edge_choice)))

    recurse(0, {}, {})
    return bgps


def score_bgp(bgp: BGP, agp: PGP) -> float:
    """Recompute the mean per-triple component sum from the AGP annotations."""
    vertex_scores = {
        v.iri: v.score for node in agp.nodes for v in node.relevant_vertices
    }
    edges = {e.id: e for e in agp.edges}
    total = 0.0
    for triple in bgp.triples:
        edge = edges[triple.edge_id]
        s_predicate = next(
            p.score for p in edge.relevant_predicates if p.iri == triple.predicate
        )
        s_subject = 0.0 if triple.subject.startswith("?") else vertex_scores[triple.subject]
        s_object = 0.0 if triple.object.startswith("?") else vertex_scores[triple.object]
        total += s_subject + s_predicate + s_object
    return total / len(bgp.triples)


def _bgp_sort_key(bgp: BGP):
    serialized = "\n".join(f"{t.subject} {t.predicate} {t.object}" for t in bgp.triples)
    return (-bgp.score, serialized)


def topk_full(agp: PGP, k: int) -> list[BGP]:
    return sorted(enumerate_bgps(agp), key=_bgp_sort_key)[:k]


def topk_lazy(agp: PGP, k: int) -> list[BGP]:
    """Best-first product enumeration; returns exactly the full top-K.

    Contributions are additive per choice (a node's vertex score counts once
    per incident triple), so the best-first frontier visits states in
    nonincreasing score order.  States are drained until the frontier's bound
    falls strictly below the current K-th score, then the collected states
    are ranked with the same key as full enumeration.
    """
    if not agp.edges:
        raise NoViableBGP("annotated graph has no edges")
    names = variable_names(agp)
    node_dims = _node_dims(agp)
    edge_dims = _edge_dims(agp)

    degree: dict[str, int] = {}
    for edge in agp.edges:
        for endpoint in (edge.endpoint_a, edge.endpoint_b):
            degree[endpoint] = degree.get(endpoint, 0) + 1

    dims: list[tuple[str, str, list]] = []  # (kind, key, options sorted desc)
    weights: list[list[float]] = []
    for key, options in node_dims:
        ordered = sorted(options, key=lambda v: (-v.score, v.iri))
        dims.append(("node", key, ordered))
        weights.append([degree.get(key, 0) * v.score for v in ordered])
    for key, options in edge_dims:
        ordered = sorted(options, key=lambda p: (-p.score, p.iri))
        dims.append(("edge", key, ordered))
        weights.append([p.score for p in ordered])

    n_triples = len(agp.edges)

    def bound(state: tuple[int, ...]) -> float:
        return sum(w[i] for w, i in zip(weights, state)) / n_triples

    start = tuple(0 for _ in dims)
    heap = [(-bound(start), start)]
    visited = {start}
    collected: list[tuple[float, tuple[int, ...]]] = []
    kth = -math.inf
    while heap:
        negative, state = heapq.heappop(heap)
        score = -negative
        if len(collected) >= k and score < kth - 1e-9:
            break
        collected.append((score, state))
        if len(collected) >= k:
            kth = sorted((s for s, _ in collected), reverse=True)[k - 1]
        for d in range(len(dims)):
            if state[d] + 1 < len(dims[d][2]):
                successor = state[:d] + (state[d] + 1,) + state[d + 1:]
                if successor not in visited:
                    visited.add(successor)
                    heapq.heappush(heap, (-bound(successor), successor))

    bgps = []
    for _, state in collected:
        node_choice = {}
        edge_choice = {}
        for (kind, key, options), index in zip(dims, state):
            if kind == "node":
                node_choice[key] = options[index]
            else:
                edge_choice[key] = options[index]
        bgps.append(_assemble(agp, names, node_choice, edge_choice))
    return sorted(bgps, key=_bgp_sort_key)[:k]


# --- SPARQL serialization ---------------------------------------------------------


def _render(value: str) -> str:
    return value if value.startswith("?") else f"<{value}>"


def _type_variable(bgp: BGP) -> str:
    used = {
        v[1:]
        for t in bgp.triples
        for v in (t.subject, t.object)
        if v.startswith("?")
    }
    name = "c"
    counter = 0
    while name in used:
        name = f"c{counter}"
        counter += 1
    return f"?{name}"


def serialize_plan(bgp: BGP, main_var: str | None) -> tuple[str, str, str | None]:
    """Render a BGP as SPARQL; returns (sparql, form, type variable)."""
    lines = [f"  {_render(t.subject)} {_render(t.predicate)} {_render(t.object)} ." for t in bgp.triples]
    if main_var is None:
        sparql = "ASK {\n" + "\n".join(lines) + "\n}"
        return sparql, ASK, None
    type_var = _type_variable(bgp)
    lines.append(f"  OPTIONAL {{ {main_var} <{RDF_TYPE}> {type_var} }}")
    sparql = (
        f"SELECT DISTINCT {main_var} {type_var} WHERE {{\n"
        + "\n".join(lines)
        + "\n}"
    )
    return sparql, SELECT, type_var


def plan(agp: PGP, prediction: AnswerTypePrediction | None, k: int = 40) -> list[QueryPlan]:
    """Top-K ranked query plans for an annotated graph."""
    if k < 1:
        raise ValueError("K must be positive")
    main = agp.main_unknown
    if main is None and not agp.boolean_flagged:
        raise GraphError("annotated graph has no main unknown and is not boolean")
    main_var = variable_names(agp).get(main.id) if main is not None else None

    total = 1
    for _, options in _node_dims(agp):
        total *= len(options)
    for _, options in _edge_dims(agp):
        total *= len(options)
    if total > LAZY_FACTOR * k:
        ranked = topk_lazy(agp, k)
    else:
        ranked = topk_full(agp, k)

    plans = []
    for position, bgp in enumerate(ranked, start=1):
        sparql, form, _ = serialize_plan(bgp, main_var)
        plans.append(
            QueryPlan(bgp=bgp, sparql=sparql, rank=position, form=form, main_var=main_var)
        )
    return plans


def plan_to_dict(query_plan: QueryPlan) -> dict:
    from .graph import bgp_to_dict

    return {
        "rank": query_plan.rank,
        "form": query_plan.form,
        "sparql": query_plan.sparql,
        "score": query_plan.bgp.score,
        "main_var": query_plan.main_var,
        "bgp": bgp_to_dict(query_plan.bgp),
    }
