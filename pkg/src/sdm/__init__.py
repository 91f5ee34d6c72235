"""Semantic direct modeling workbench: meshes, tokens, pointer generation,
command parsing, feature edits, and an HTTP service tying them together."""

__version__ = "0.1.0"
