"""HTTP JSON API over the knowledge base."""

from aida.service.app import ServiceConfig, build_app, create_app, load_config

__all__ = ["ServiceConfig", "build_app", "create_app", "load_config"]
