"""Desk-scale caps and numeric tolerances."""

from __future__ import annotations

import os

MAX_GROUP_ORDER = 64
MAX_THICKENING_DIM = 2
MAX_OBSTRUCTION_RANK = 4
TOLERANCE = 1e-9
TRANSVERSALITY_THRESHOLD = 1e-6
MAX_RESEEDS = 32


def max_objects() -> int:
    """Object cap, overridable through ``FLOWCAT_MAX_OBJECTS``."""
    raw = os.environ.get("FLOWCAT_MAX_OBJECTS", "64")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"FLOWCAT_MAX_OBJECTS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("FLOWCAT_MAX_OBJECTS must be positive")
    return value
