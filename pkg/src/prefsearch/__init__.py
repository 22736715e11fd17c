"""Preference-weighted product search with a faceted baseline and
session-level IR evaluation tooling."""

__version__ = "0.1.0"
