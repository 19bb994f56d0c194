"""Application configuration: TOML file plus flag overrides.

API keys and the service token come from environment variables only; the
file names which variables to read.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Union

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .engine.engine import EngineConfig
from .operators.clarifying import ClarifyConfig
from .operators.summarizing import SummaryConfig
from .providers.config import ProviderConfig


class ConfigError(Exception):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origin: Optional[str] = None
    token_env: str = "REASONWEAVE_API_TOKEN"
    store_dir: str = "./sessions"


@dataclass(frozen=True)
class PipelineConfig:
    dedup_threshold: float = 0.8
    max_segments: int = 8
    preservation_floor: float = 0.85
    summary_max_words: int = 60
    backoff_base: float = 1.0
    include_summaries_in_answer: bool = False
    link_display_threshold: float = 0.5


@dataclass(frozen=True)
class AppConfig:
    server: ServerConfig = field(default_factory=ServerConfig)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    providers: ProviderConfig = field(default_factory=ProviderConfig)
    fixtures: Optional[str] = None

    def engine_config(self, *, interactive: bool = True, run_mode: str = "sync") -> EngineConfig:
        p = self.pipeline
        return EngineConfig(
            clarify=ClarifyConfig(dedup_threshold=p.dedup_threshold,
                                  embedding_model_id=self.providers.embedding.model),
            summary=SummaryConfig(max_words=p.summary_max_words),
            max_segments=p.max_segments,
            preservation_floor=p.preservation_floor,
            backoff_base=p.backoff_base,
            include_summaries_in_answer=p.include_summaries_in_answer,
            link_display_threshold=p.link_display_threshold,
            interactive=interactive,
            run_mode=run_mode,
        )


def _section(data: dict[str, Any], name: str) -> dict[str, Any]:
    value = data.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(name, "must be a table")
    return value


def _build(data: dict[str, Any]) -> AppConfig:
    server_raw = _section(data, "server")
    server = ServerConfig(
        host=str(server_raw.get("host", ServerConfig.host)),
        port=int(server_raw.get("port", ServerConfig.port)),
        cors_origin=server_raw.get("cors_origin"),
        token_env=str(server_raw.get("token_env", ServerConfig.token_env)),
        store_dir=str(server_raw.get("store_dir", ServerConfig.store_dir)),
    )
    if not 0 < server.port < 65536:
        raise ConfigError("server.port", f"{server.port} is not a valid port")

    pipeline_raw = _section(data, "pipeline")
    defaults = PipelineConfig()
    pipeline = PipelineConfig(
        dedup_threshold=float(pipeline_raw.get("dedup_threshold", defaults.dedup_threshold)),
        max_segments=int(pipeline_raw.get("max_segments", defaults.max_segments)),
        preservation_floor=float(
            pipeline_raw.get("preservation_floor", defaults.preservation_floor)),
        summary_max_words=int(
            pipeline_raw.get("summary_max_words", defaults.summary_max_words)),
        backoff_base=float(pipeline_raw.get("backoff_base", defaults.backoff_base)),
        include_summaries_in_answer=bool(
            pipeline_raw.get("include_summaries_in_answer",
                             defaults.include_summaries_in_answer)),
        link_display_threshold=float(
            pipeline_raw.get("link_display_threshold", defaults.link_display_threshold)),
    )
    if not 0 < pipeline.dedup_threshold <= 1:
        raise ConfigError("pipeline.dedup_threshold", "must be in (0, 1]")
    if pipeline.max_segments < 1:
        raise ConfigError("pipeline.max_segments", "must be at least 1")
    if pipeline.summary_max_words < 1:
        raise ConfigError("pipeline.summary_max_words", "must be at least 1")

    try:
        providers = ProviderConfig.from_dict(_section(data, "providers"))
        providers.validate()
    except (ValueError, TypeError) as exc:
        raise ConfigError("providers", str(exc))

    fixtures = data.get("fixtures")
    return AppConfig(server=server, pipeline=pipeline, providers=providers,
                     fixtures=fixtures)


def load_config(path: Optional[Union[str, Path]] = None) -> AppConfig:
    if path is None:
        return AppConfig()
    file = Path(path)
    if not file.exists():
        raise ConfigError(str(path), "config file not found")
    try:
        data = tomllib.loads(file.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"invalid TOML: {exc}")
    return _build(data)
