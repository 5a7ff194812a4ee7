"""Snore detection and wrist-device nudge pipeline."""

__version__ = "0.1.0"
