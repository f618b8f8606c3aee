"""Error hierarchy shared across the engine.

Every error carries a stable machine-readable ``code`` so the HTTP layer
and the CLI can map failures without string matching.
"""
from __future__ import annotations


class CanvasError(Exception):
    """Base class for all engine errors."""

    code = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code
