"""Packaged schema and generator constants."""
