import pytest

from askgraph.errors import DisconnectedGraph, EmptyInput, GraphError, NoUnknown
from askgraph.graph import (
    PhraseTerm,
    PhraseTriplePattern,
    Shape,
    build_pgp,
    classify_shape,
    pgp_from_dict,
    pgp_to_dict,
    pgp_to_patterns,
)


def tp(subject, relation, obj):
    return PhraseTriplePattern(subject=subject, relation_label=relation, object=obj)


def running_example_patterns():
    unknown = PhraseTerm.variable(1)
    return [
        tp(unknown, "flow", PhraseTerm.entity("Danish Straits")),
        tp(unknown, "city on shore", PhraseTerm.entity("Kaliningrad")),
    ]


class TestBuildPGP:
    def test_running_example_star(self):
        pgp = build_pgp(running_example_patterns())
        assert len(pgp.nodes) == 3
        assert len(pgp.edges) == 2
        assert len(pgp.unknowns) == 1
        assert pgp.main_unknown is not None and pgp.main_unknown.var_id == 1
        assert classify_shape(pgp) == Shape.STAR

    def test_boolean_single_triple(self):
        pattern = tp(PhraseTerm.entity("Berlin"), "capital of", PhraseTerm.entity("Germany"))
        pgp = build_pgp([pattern], boolean_flagged=True)
        assert len(pgp.nodes) == 2
        assert len(pgp.edges) == 1
        assert pgp.unknowns == ()
        assert pgp.main_unknown is None

    def test_path_shape_node_count(self):
        # brute-force oracle: distinct entity labels plus distinct var_ids
        v1, v2 = PhraseTerm.variable(1), PhraseTerm.variable(2)
        patterns = [
            tp(v1, "r1", PhraseTerm.entity("A")),
            tp(v1, "r2", v2),
            tp(v2, "r3", PhraseTerm.entity("B")),
        ]
        labels = {t.label for p in patterns for t in (p.subject, p.object) if not t.is_variable}
        var_ids = {t.var_id for p in patterns for t in (p.subject, p.object) if t.is_variable}
        pgp = build_pgp(patterns)
        assert len(pgp.nodes) == len(labels) + len(var_ids) == 4
        assert len(pgp.edges) == 3

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            build_pgp([])

    def test_disconnected_rejected(self):
        patterns = [
            tp(PhraseTerm.variable(1), "r1", PhraseTerm.entity("A")),
            tp(PhraseTerm.variable(2), "r2", PhraseTerm.entity("B")),
        ]
        with pytest.raises(DisconnectedGraph):
            build_pgp(patterns)

    def test_no_unknown_without_boolean_flag(self):
        pattern = tp(PhraseTerm.entity("Berlin"), "capital of", PhraseTerm.entity("Germany"))
        with pytest.raises(NoUnknown):
            build_pgp([pattern])

    def test_lowest_var_id_is_main(self):
        patterns = [
            tp(PhraseTerm.variable(3), "r1", PhraseTerm.entity("A")),
            tp(PhraseTerm.variable(3), "r2", PhraseTerm.variable(7)),
        ]
        pgp = build_pgp(patterns)
        assert pgp.main_unknown.var_id == 3
        intermediates = [n for n in pgp.unknowns if not n.is_main]
        assert [n.var_id for n in intermediates] == [7]

    def test_merge_is_exact_and_case_sensitive(self):
        patterns = [
            tp(PhraseTerm.variable(1), "r1", PhraseTerm.entity("Paris")),
            tp(PhraseTerm.variable(1), "r2", PhraseTerm.entity("paris")),
        ]
        pgp = build_pgp(patterns)
        assert len([n for n in pgp.nodes if n.kind == "entity"]) == 2

    def test_decompose_round_trip(self):
        patterns = running_example_patterns()
        assert pgp_to_patterns(build_pgp(patterns)) == patterns

    def test_self_loop_rejected(self):
        with pytest.raises(GraphError):
            tp(PhraseTerm.variable(1), "r", PhraseTerm.variable(1))


class TestClassifyShape:
    def test_single_edge_is_star(self):
        pgp = build_pgp([tp(PhraseTerm.variable(1), "r", PhraseTerm.entity("A"))])
        assert classify_shape(pgp) == Shape.STAR

    def test_three_edge_chain_is_path(self):
        v1, v2 = PhraseTerm.variable(1), PhraseTerm.variable(2)
        pgp = build_pgp(
            [
                tp(v1, "r1", PhraseTerm.entity("A")),
                tp(v1, "r2", v2),
                tp(v2, "r3", PhraseTerm.entity("B")),
            ]
        )
        # adjacency-degree oracle: exactly two degree-1 nodes, rest degree-2
        degree = {}
        for e in pgp.edges:
            degree[e.endpoint_a] = degree.get(e.endpoint_a, 0) + 1
            degree[e.endpoint_b] = degree.get(e.endpoint_b, 0) + 1
        assert sorted(degree.values()) == [1, 1, 2, 2]
        assert classify_shape(pgp) == Shape.PATH

    def test_star_with_three_edges(self):
        v1 = PhraseTerm.variable(1)
        pgp = build_pgp(
            [
                tp(v1, "r1", PhraseTerm.entity("A")),
                tp(v1, "r2", PhraseTerm.entity("B")),
                tp(v1, "r3", PhraseTerm.entity("C")),
            ]
        )
        assert classify_shape(pgp) == Shape.STAR


class TestSerialization:
    def test_round_trip_json(self):
        pgp = build_pgp(running_example_patterns())
        data = pgp_to_dict(pgp)
        assert set(data) == {"nodes", "edges", "prediction", "boolean_flagged"}
        restored = pgp_from_dict(data)
        assert pgp_to_dict(restored) == data
        assert set(restored.nodes) == set(pgp.nodes)
        assert set(restored.edges) == set(pgp.edges)

    def test_node_field_names(self):
        data = pgp_to_dict(build_pgp(running_example_patterns()))
        node = data["nodes"][0]
        for key in ("id", "label", "kind", "is_main", "relevant_vertices"):
            assert key in node
