"""HTTP front end and the job handlers it shares with the command line."""

from .app import create_app
from .handlers import ParseError, SchemaError

__all__ = ["create_app", "ParseError", "SchemaError"]
