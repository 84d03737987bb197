"""A small intensional Martin-Loef type theory checker with axiom tracking."""

__version__ = "0.1.0"
