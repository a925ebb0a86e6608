"""FastAPI service exposing the toolkit over HTTP."""

from . import ops, schemas

__all__ = ["ops", "schemas"]
