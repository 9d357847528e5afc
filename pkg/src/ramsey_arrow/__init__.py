"""Executable Ramsey-arrow experiments for random graphs: clique versus path."""

__version__ = "0.1.0"
