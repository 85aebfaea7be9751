"""HTTP service exposing the analysis toolkit."""

from .app import create_app

__all__ = ["create_app"]
