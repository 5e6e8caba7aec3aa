"""HTTP service: request/response schemas, accounts, and the app factory."""

from .app import create_app

__all__ = ["create_app"]
