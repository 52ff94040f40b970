"""Labeled anticipating-vs-relevant patent pair datasets and scorer evaluation."""

__version__ = "0.1.0"
