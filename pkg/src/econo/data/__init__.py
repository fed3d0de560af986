"""Packaged datasets and response-surface tables."""
