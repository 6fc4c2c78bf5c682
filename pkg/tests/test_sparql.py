import threading
import time

import pytest

import askgraph.sparql as sparql_mod
from askgraph.errors import EndpointError, MalformedResults, Transport
from askgraph.fixture import FixtureServer, FixtureStore, parse_ntriples
from askgraph.sparql import (
    GENERIC_REGEX,
    STARDOG,
    VIRTUOSO,
    EndpointConfig,
    RDFTerm,
    contains_dialect,
    execute_ask,
    execute_select,
    mark_contains_unsupported,
    render_contains,
    reset_contains_fallback,
)

RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"


class TestEndpointConfig:
    def test_url_must_be_http(self):
        with pytest.raises(ValueError):
            EndpointConfig(url="ftp://example.org/sparql")

    def test_max_retries_capped(self):
        with pytest.raises(ValueError):
            EndpointConfig(url="http://example.org/sparql", max_retries=6)


class TestRDFTerm:
    def test_datatype_lang_exclusive(self):
        with pytest.raises(ValueError):
            RDFTerm("literal", "x", datatype="d", lang="en")

    def test_datatype_only_on_literals(self):
        with pytest.raises(ValueError):
            RDFTerm("iri", "http://x", datatype="d")


class TestExecuteSelect:
    def test_two_rows(self, endpoint):
        table = execute_select(
            endpoint,
            "SELECT DISTINCT ?s WHERE { ?s <http://dbpedia.org/property/city>"
            " ?o . }",
        )
        assert table.variables == ["s"]
        assert len(table.rows) == 1  # fixture has one stadium

        table = execute_select(
            endpoint,
            f'SELECT DISTINCT ?s ?o WHERE {{ ?s <{RDFS_LABEL}> ?o . }} LIMIT 2',
        )
        assert len(table.rows) == 2

    def test_empty_result_keeps_variables(self, endpoint):
        table = execute_select(
            endpoint,
            "SELECT DISTINCT ?s WHERE { ?s <http://example.org/never> ?o . }",
        )
        assert table.variables == ["s"]
        assert table.rows == []

    def test_timeout_retries_then_transport(self, dbpedia_store, monkeypatch):
        monkeypatch.setattr(sparql_mod, "BACKOFF_BASE", 0.01)
        with FixtureServer(dbpedia_store) as server:
            server.before_query = lambda q: time.sleep(0.8)
            cfg = EndpointConfig(url=server.url, max_retries=1, request_timeout=0.15)
            with pytest.raises(Transport):
                execute_select(cfg, "SELECT ?s WHERE { ?s ?p ?o . }")
            deadline = time.time() + 2
            while server.request_count < 2 and time.time() < deadline:
                time.sleep(0.05)
            assert server.request_count == cfg.max_retries + 1

    def test_endpoint_error_carries_body(self, endpoint):
        with pytest.raises(EndpointError) as info:
            execute_select(endpoint, "GARBAGE QUERY {{{")
        assert info.value.status == 400

    def test_malformed_results(self):
        from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                body = b"{\"nonsense\": true}"
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        threading.Thread(target=httpd.serve_forever, daemon=True).start()
        try:
            url = f"http://127.0.0.1:{httpd.server_address[1]}/sparql"
            cfg = EndpointConfig(url=url, max_retries=0)
            with pytest.raises(MalformedResults):
                execute_select(cfg, "SELECT ?s WHERE { ?s ?p ?o . }")
            with pytest.raises(MalformedResults):
                execute_ask(cfg, "ASK { ?s ?p ?o }")
        finally:
            httpd.shutdown()
            httpd.server_close()


class TestExecuteAsk:
    def test_labels_present(self, endpoint):
        assert execute_ask(endpoint, f"ASK {{ ?p <{RDFS_LABEL}> ?o }}") is True

    def test_label_free_store(self, mag_endpoint):
        assert execute_ask(mag_endpoint, f"ASK {{ ?p <{RDFS_LABEL}> ?o }}") is False


class TestRenderContains:
    def test_virtuoso_form(self):
        fragment = render_contains(VIRTUOSO, "d_v", ["Danish", "Straits"])
        assert fragment == "?d_v <bif:contains> '(\"Danish\" OR \"Straits\")'"

    def test_generic_regex_single_keyword(self):
        fragment = render_contains(GENERIC_REGEX, "d_v", ["Kaliningrad"])
        assert fragment == 'FILTER(regex(str(?d_v), "Kaliningrad", "i"))'

    def test_stardog_form(self):
        fragment = render_contains(STARDOG, "d_v", ["Danish"])
        assert "textMatch" in fragment and '"Danish"' in fragment

    def test_quote_stripping_round_trips_through_fixture(self, endpoint):
        fragment = render_contains(VIRTUOSO, "d_v", ['Kalin"ingrad'])
        assert fragment == "?d_v <bif:contains> '(\"Kaliningrad\")'"
        query = f"SELECT DISTINCT ?v ?d_v WHERE {{ ?v ?p ?d_v . {fragment} . }} LIMIT 10"
        table = execute_select(endpoint, query)
        values = {row["d_v"].value for row in table.rows}
        assert "Kaliningrad" in values
        assert all("kaliningrad" in v.lower() for v in values)

    def test_injective_per_dialect(self):
        lists = [["a"], ["b"], ["a", "b"], ["a b"], ["a|b"], ["ab"]]
        for dialect in (VIRTUOSO, STARDOG, GENERIC_REGEX):
            rendered = [render_contains(dialect, "x", kws) for kws in lists]
            assert len(set(rendered)) == len(lists)

    def test_downgrade_cache(self):
        reset_contains_fallback()
        cfg = EndpointConfig(url="http://example.org/sparql")
        assert contains_dialect(cfg) == VIRTUOSO
        mark_contains_unsupported(cfg)
        assert contains_dialect(cfg) == GENERIC_REGEX
        reset_contains_fallback()


class TestNTriples:
    def test_literal_variants(self):
        text = (
            '<http://a> <http://p> "plain" .\n'
            '<http://a> <http://p> "tagged"@en .\n'
            '<http://a> <http://p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> .\n'
            '<http://a> <http://p> "es\\"caped" .\n'
            "# comment\n"
        )
        triples = parse_ntriples(text)
        assert len(triples) == 4
        assert triples[3][2].value == 'es"caped' or any(
            t[2].value == 'es"caped' for t in triples
        )

    def test_bad_line_reports_number(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_ntriples('<http://a> <http://p> "x" .\nnot a triple\n')


class TestFixtureEvaluator:
    def test_distinct_and_limit(self):
        triples = parse_ntriples(
            "\n".join(
                f'<http://e/{i}> <{RDFS_LABEL}> "thing {i}" .' for i in range(500)
            )
        )
        big = FixtureStore(triples)
        result = big.query(
            "SELECT DISTINCT ?v ?d_v WHERE { ?v ?p ?d_v . "
            "?d_v <bif:contains> '(\"thing\")' . } LIMIT 400"
        )
        assert len(result["results"]["bindings"]) == 400

    def test_optional_left_join(self, dbpedia_store):
        result = dbpedia_store.query(
            "SELECT DISTINCT ?unknown1 ?c WHERE {\n"
            "  ?unknown1 <http://dbpedia.org/property/outflow>"
            " <http://dbpedia.org/resource/Danish_straits> .\n"
            "  OPTIONAL { ?unknown1"
            " <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> ?c }\n}"
        )
        rows = result["results"]["bindings"]
        assert len(rows) == 1
        assert rows[0]["unknown1"]["value"] == "http://dbpedia.org/resource/Baltic_Sea"
        assert rows[0]["c"]["value"] == "http://dbpedia.org/ontology/Sea"

    def test_optional_missing_binding_omitted(self, dbpedia_store):
        result = dbpedia_store.query(
            "SELECT DISTINCT ?s ?c WHERE {\n"
            "  ?s <http://dbpedia.org/property/city>"
            " <http://dbpedia.org/resource/Kaliningrad> .\n"
            "  OPTIONAL { ?s <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> ?c }\n}"
        )
        rows = result["results"]["bindings"]
        assert len(rows) == 1
        assert "c" not in rows[0]

    def test_regex_filter(self, dbpedia_store):
        result = dbpedia_store.query(
            'SELECT DISTINCT ?v ?d_v WHERE { ?v ?p ?d_v . '
            'FILTER(regex(str(?d_v), "Danish", "i")) . } LIMIT 10'
        )
        values = {row["d_v"]["value"] for row in result["results"]["bindings"]}
        # str() coerces IRIs too, so the resource IRI also matches
        assert values == {
            "Danish straits",
            "http://dbpedia.org/resource/Danish_straits",
        }

    def test_round_trip_through_protocol(self, endpoint, dbpedia_store):
        # every results document the fixture serves must parse
        queries = [
            "SELECT DISTINCT ?s ?p ?o WHERE { ?s ?p ?o . } LIMIT 50",
            f"ASK {{ ?p <{RDFS_LABEL}> ?o }}",
        ]
        for query in queries:
            if query.startswith("ASK"):
                assert isinstance(execute_ask(endpoint, query), bool)
            else:
                table = execute_select(endpoint, query)
                assert table.rows
