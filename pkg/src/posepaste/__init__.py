"""Pose-guided copy-paste dataset synthesis and ReID evaluation utilities."""

__version__ = "0.1.0"
