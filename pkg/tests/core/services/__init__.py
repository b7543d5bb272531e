"""Core services tests."""
