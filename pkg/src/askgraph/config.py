"""Pipeline configuration with layered precedence.

Built-in defaults < config file < environment variables < CLI flags <
per-request API overrides.  The config file is line-oriented ``key=value``
with ``#`` comments; environment variables mirror the keys with the
``ASKGRAPH_`` prefix (uppercased).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from importlib import resources

from .errors import ConfigError
from .linker import LinkerParams
from .qu import OFFLINE_EXTRACTOR, REMOTE_MODEL, QUProviderConfig
from .sparql import DIALECTS, VIRTUOSO, EndpointConfig

ENV_PREFIX = "ASKGRAPH_"

_INT_KEYS = {"max_vr", "k_vertices", "k_predicates", "per_vertex_limit",
             "max_queries", "max_retries", "parallelism"}
_FLOAT_KEYS = {"tau", "timeout", "qu_timeout"}
_STR_KEYS = {"endpoint", "dialect", "embeddings", "qu_url", "default_graph"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def fixture_path(name: str) -> str:
    return str(resources.files("askgraph.fixtures").joinpath(name))


@dataclass(frozen=True)
class PipelineConfig:
    endpoint: EndpointConfig
    linker: LinkerParams = field(default_factory=LinkerParams)
    K: int = 40
    qu: QUProviderConfig = field(default_factory=QUProviderConfig)
    embedding_path: str | None = None
    tau: float = 0.5
    parallelism: int = 4

    def apply_overrides(self, overrides: dict) -> "PipelineConfig":
        """Per-request overrides (the innermost precedence layer)."""
        unknown = set(overrides) - KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown override keys: {sorted(unknown)}")
        return _build(_as_settings(self) | dict(overrides))


def parse_config_file(path: str) -> dict:
    settings = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError("expected key=value", line=line_no)
            key, _, value = stripped.partition("=")
            key = key.strip().lower()
            if key not in KNOWN_KEYS:
                raise ConfigError(f"unknown key {key!r}", line=line_no)
            settings[key] = value.strip()
    return settings


def _env_settings(environ) -> dict:
    settings = {}
    for key in KNOWN_KEYS:
        value = environ.get(ENV_PREFIX + key.upper())
        if value is not None:
            settings[key] = value
    return settings


def _coerce(key: str, value) -> object:
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc
    return value


def _as_settings(cfg: PipelineConfig) -> dict:
    return {
        "endpoint": cfg.endpoint.url,
        "dialect": cfg.endpoint.dialect,
        "timeout": cfg.endpoint.request_timeout,
        "max_retries": cfg.endpoint.max_retries,
        "default_graph": cfg.endpoint.default_graph,
        "max_vr": cfg.linker.max_fetched_vertices,
        "k_vertices": cfg.linker.vertices_per_node,
        "k_predicates": cfg.linker.predicates_per_edge,
        "per_vertex_limit": cfg.linker.predicates_per_vertex_limit,
        "max_queries": cfg.K,
        "qu_url": cfg.qu.endpoint_url,
        "qu_timeout": cfg.qu.timeout,
        "embeddings": cfg.embedding_path,
        "tau": cfg.tau,
        "parallelism": cfg.parallelism,
    }


_DEFAULTS = {
    "endpoint": None,
    "dialect": VIRTUOSO,
    "timeout": 15.0,
    "max_retries": 2,
    "default_graph": None,
    "max_vr": 400,
    "k_vertices": 1,
    "k_predicates": 20,
    "per_vertex_limit": 100,
    "max_queries": 40,
    "qu_url": None,
    "qu_timeout": 15.0,
    "embeddings": None,
    "tau": 0.5,
    "parallelism": 4,
}


def _build(settings: dict) -> PipelineConfig:
    values = dict(_DEFAULTS)
    for key, value in settings.items():
        if value is not None:
            values[key] = _coerce(key, value)
    if not values["endpoint"]:
        raise ConfigError("no endpoint configured")
    if values["dialect"] not in DIALECTS:
        raise ConfigError(f"unknown dialect {values['dialect']!r}")
    endpoint = EndpointConfig(
        url=values["endpoint"],
        dialect=values["dialect"],
        request_timeout=values["timeout"],
        max_retries=values["max_retries"],
        default_graph=values["default_graph"],
    )
    linker = LinkerParams(
        max_fetched_vertices=values["max_vr"],
        vertices_per_node=values["k_vertices"],
        predicates_per_edge=values["k_predicates"],
        predicates_per_vertex_limit=values["per_vertex_limit"],
    )
    qu = QUProviderConfig(
        kind=REMOTE_MODEL if values["qu_url"] else OFFLINE_EXTRACTOR,
        endpoint_url=values["qu_url"],
        timeout=values["qu_timeout"],
    )
    return PipelineConfig(
        endpoint=endpoint,
        linker=linker,
        K=values["max_queries"],
        qu=qu,
        embedding_path=values["embeddings"],
        tau=values["tau"],
        parallelism=values["parallelism"],
    )


def merge_settings(
    config_file: str | None = None,
    flags: dict | None = None,
    environ=None,
) -> dict:
    """Raw key/value settings merged by precedence (file < env < flags)."""
    settings: dict = {}
    if config_file:
        settings.update(parse_config_file(config_file))
    settings.update(_env_settings(environ if environ is not None else os.environ))
    for key, value in (flags or {}).items():
        if value is not None:
            if key not in KNOWN_KEYS:
                raise ConfigError(f"unknown flag {key!r}")
            settings[key] = value
    return settings


def build_config(settings: dict) -> PipelineConfig:
    return _build(settings)


def load_config(
    config_file: str | None = None,
    flags: dict | None = None,
    environ=None,
) -> PipelineConfig:
    """Merge defaults, file, environment and flags into a PipelineConfig."""
    return _build(merge_settings(config_file, flags, environ))
