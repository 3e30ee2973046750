"""Stereo matching cost volumes, confidence measures, and sparsification evaluation."""

__version__ = "0.1.0"
