"""Initializes the 'schemas' package."""
