"""Core functionality for neuro-drift."""
