"""Exact twistability and stability computations for SNC degenerations."""
from __future__ import annotations

__version__ = "0.1.0"
