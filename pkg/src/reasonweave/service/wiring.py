"""Assemble an engine from application config."""
from __future__ import annotations

from ..config import AppConfig
from ..engine.engine import SessionEngine
from ..engine.store import SessionStore
from ..operators.catalog import PromptCatalog
from ..providers.config import http_provider_set, scripted_provider_set
from ..providers.scripted import load_fixtures


def build_providers(config: AppConfig, fixtures_path=None):
    path = fixtures_path or config.fixtures
    if path:
        return scripted_provider_set(load_fixtures(path))
    return http_provider_set(config.providers)


def build_engine(config: AppConfig, *, fixtures_path=None, interactive: bool = True,
                 run_mode: str = "sync", with_store: bool = True) -> SessionEngine:
    providers = build_providers(config, fixtures_path)
    store = SessionStore(config.server.store_dir) if with_store else None
    return SessionEngine(
        providers,
        PromptCatalog.default(),
        store=store,
        config=config.engine_config(interactive=interactive, run_mode=run_mode),
    )
