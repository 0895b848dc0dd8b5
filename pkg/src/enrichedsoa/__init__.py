"""Enriched small object argument over finite sets, with lifting and coend oracles."""

__version__ = "0.1.0"
