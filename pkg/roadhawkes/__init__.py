"""Roadhawkes - self-exciting incident models on a directed roadway."""

__version__ = "0.1.0"
