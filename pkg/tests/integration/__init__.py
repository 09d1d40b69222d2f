"""Integration tests for zrcrit."""
