"""Spin O(n) models on discrete tori and loop O(n) models on hexagonal domains."""

__version__ = "0.1.0"
