"""HTTP service exposing the simulator (FastAPI)."""

from .app import app

__all__ = ["app"]
