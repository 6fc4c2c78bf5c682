import pytest

from askgraph.affinity import EmbeddingStore
from askgraph.config import fixture_path
from askgraph.fixture import FixtureServer, FixtureStore
from askgraph.sparql import EndpointConfig, reset_contains_fallback


@pytest.fixture(scope="session")
def store() -> EmbeddingStore:
    return EmbeddingStore.from_file(fixture_path("embeddings.txt"))


@pytest.fixture(scope="session")
def dbpedia_store() -> FixtureStore:
    return FixtureStore.from_ntriples(fixture_path("dbpedia_slice.nt"))


@pytest.fixture(scope="session")
def mag_store() -> FixtureStore:
    return FixtureStore.from_ntriples(fixture_path("mag_slice.nt"))


@pytest.fixture(scope="session")
def dbpedia_server(dbpedia_store):
    with FixtureServer(dbpedia_store) as server:
        yield server


@pytest.fixture(scope="session")
def mag_server(mag_store):
    with FixtureServer(mag_store) as server:
        yield server


@pytest.fixture
def endpoint(dbpedia_server) -> EndpointConfig:
    reset_contains_fallback()
    return EndpointConfig(url=dbpedia_server.url, max_retries=0, request_timeout=10.0)


@pytest.fixture
def mag_endpoint(mag_server) -> EndpointConfig:
    reset_contains_fallback()
    return EndpointConfig(url=mag_server.url, max_retries=0, request_timeout=10.0)
