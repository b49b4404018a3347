"""Small planar geometry helpers used across the engine.

Headings follow the compass convention: 0 deg points along +y ("north"),
angles grow clockwise, so +x ("east") is 90 deg.
"""

from __future__ import annotations

import math
from typing import Sequence

Position = Sequence[float]


def normalize_deg(angle: float) -> float:
    """Map an angle into [0, 360)."""
    a = math.fmod(angle, 360.0)
    if a < 0:
        a += 360.0
    return 0.0 if a == 360.0 else a


def normalize_signed_deg(angle: float) -> float:
    """Map an angle into [-180, 180)."""
    a = normalize_deg(angle)
    return a - 360.0 if a >= 180.0 else a


def euclid(a: Position, b: Position) -> float:
    return math.dist(tuple(a), tuple(b))


def bearing_deg(origin: Position, target: Position) -> float:
    """Compass bearing from origin to target, in [0, 360).

    Returns 0.0 for coincident points (the direction is undefined there).
    """
    dx = target[0] - origin[0]
    dy = target[1] - origin[1]
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return normalize_deg(math.degrees(math.atan2(dx, dy)))


def path_length(points: Sequence[Position]) -> float:
    """Total polyline length."""
    return sum(euclid(points[i], points[i + 1]) for i in range(len(points) - 1))
