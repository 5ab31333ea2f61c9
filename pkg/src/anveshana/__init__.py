"""Anveshana: gamified adaptive-learning platform engine."""

__version__ = "0.1.0"
