from .app import create_app
from .wiring import build_engine, build_providers

__all__ = ["create_app", "build_engine", "build_providers"]
