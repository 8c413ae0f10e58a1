"""Core domain types, settings and persistence."""
