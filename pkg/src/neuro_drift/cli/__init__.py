"""Command-line interface for neuro-drift."""
