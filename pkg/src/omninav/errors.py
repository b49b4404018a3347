"""Exception hierarchy shared by every omninav module.

Each error carries a stable ``code`` string so that out-of-process callers
(bindings, stdio detectors) can map failures back to a named condition.
"""

from __future__ import annotations


class OmninavError(Exception):
    """Base class for all engine errors."""

    code = "OmninavError"


class PositionConflict(OmninavError):
    """A viewpoint id was re-registered with a different position."""

    code = "PositionConflict"


class UnknownViewpoint(OmninavError):
    code = "UnknownViewpoint"


class InvalidDetection(OmninavError):
    code = "InvalidDetection"


class MissingPosition(OmninavError):
    """A geometry-dependent operation hit a viewpoint without coordinates."""

    code = "MissingPosition"


class ParseError(OmninavError):
    """Malformed serialized payload. ``offset`` is the byte offset when known."""

    code = "ParseError"

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class BoxOutOfBounds(OmninavError):
    code = "BoxOutOfBounds"


class DetectorUnavailable(OmninavError):
    code = "DetectorUnavailable"


class MissingAnswerMarker(OmninavError):
    code = "MissingAnswerMarker"


class CacheCorrupt(OmninavError):
    code = "CacheCorrupt"


class DegenerateInput(OmninavError):
    code = "DegenerateInput"


class DistanceOutOfTable(OmninavError):
    code = "DistanceOutOfTable"


class ShapeMismatch(OmninavError):
    code = "ShapeMismatch"


class SceneMismatch(OmninavError):
    code = "SceneMismatch"


class AgentFailure(OmninavError):
    """Agent raised during navigation; ``episode_index`` locates the failure."""

    code = "AgentFailure"

    def __init__(self, message: str, episode_index: int):
        super().__init__(f"episode {episode_index}: {message}")
        self.episode_index = episode_index


class ConfigInvalid(OmninavError):
    code = "ConfigInvalid"


class EmptyPath(OmninavError):
    code = "EmptyPath"
