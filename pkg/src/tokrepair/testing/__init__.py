"""Test support: an in-process HTTP server speaking the model wire format."""

from .mock_sidecar import MockSidecar

__all__ = ["MockSidecar"]
