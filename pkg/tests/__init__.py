"""Tests for zrcrit."""
