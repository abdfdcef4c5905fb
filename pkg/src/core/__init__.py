"""Initializes the 'core' package."""
