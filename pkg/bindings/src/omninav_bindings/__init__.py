"""Handle-based bindings over the omninav graph memory.

Agent stacks talk to the engine through opaque integer handles and plain
data: dict records in, dict lists and contiguous row-major buffers out.
Every call passes straight through to the primary operation of the same
name; nothing is recomputed or cached on this side, so values round-trip
without loss.

A handle must not be used from multiple threads at once; independent
handles are fully isolated and safe to drive in parallel.

Errors surface as :class:`BindingError` (a RuntimeError) carrying the
primary error name in ``code``.
"""

from __future__ import annotations

import itertools
import threading
from typing import Sequence

import numpy as np

from omninav.detection import BoundingBox, Detection
from omninav.errors import OmninavError
from omninav.fusion import (
    EmbeddingConfig,
    FusedKeyword,
    KeywordEmbedder,
    build_map_embedding as _build_map_embedding,
    fuse_discrete as _fuse_discrete,
)
from omninav.geometry import bearing_deg
from omninav.graph import (
    Omnigraph,
    Viewpoint,
    deserialize as _deserialize,
    serialize as _serialize,
)

__all__ = [
    "BindingError",
    "bearing_view_index",
    "build_map_embedding",
    "create_graph",
    "destroy",
    "fuse_discrete",
    "load",
    "record_arrival",
    "serialize",
]


class BindingError(RuntimeError):
    """Primary-component failure; ``code`` names the original error."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def _wrap(fn):
    def inner(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except OmninavError as exc:
            raise BindingError(exc.code, str(exc)) from exc

    return inner


_graphs: dict[int, Omnigraph] = {}
_next_handle = itertools.count(1)
_registry_lock = threading.Lock()


def _graph(handle: int) -> Omnigraph:
    try:
        return _graphs[handle]
    except KeyError:
        raise BindingError("UnknownHandle", f"no graph behind handle {handle}") from None


@_wrap
def create_graph(scene_id: str) -> int:
    with _registry_lock:
        handle = next(_next_handle)
        _graphs[handle] = Omnigraph(scene_id)
    return handle


def destroy(handle: int) -> None:
    with _registry_lock:
        _graphs.pop(handle, None)


def _detection_from_record(rec: dict) -> Detection:
    return Detection(
        label=rec["label"],
        box=BoundingBox(*rec["box"]),
        confidence=rec["confidence"],
        heading_deg=rec["heading_deg"],
    )


@_wrap
def record_arrival(
    handle: int,
    prev: str | None,
    viewpoint: dict,
    detections: Sequence[dict] = (),
) -> None:
    """viewpoint: {"id", "position"?}; detections: graph-schema records."""
    vp = Viewpoint(
        id=viewpoint["id"],
        position=tuple(viewpoint["position"]) if viewpoint.get("position") is not None else None,
    )
    _graph(handle).record_arrival(prev, vp, [_detection_from_record(d) for d in detections])


def bearing_view_index(graph: Omnigraph, current: str, neighbour: str, view_count: int = 12) -> int:
    """Default discrete view index: the move's bearing quantized into
    view_count equal bins; 0 when either endpoint lacks a position."""
    a = graph.nodes[current].position
    b = graph.nodes[neighbour].position
    if a is None or b is None:
        return 0
    step = 360.0 / view_count
    return int(round(bearing_deg(a, b) / step)) % view_count


@_wrap
def fuse_discrete(handle: int, current: str, d_n: int, view_count: int = 12) -> list[dict]:
    graph = _graph(handle)
    fused = _fuse_discrete(
        graph,
        current,
        d_n,
        lambda cur, nb: bearing_view_index(graph, cur, nb, view_count),
    )
    return [
        {"label": fk.label, "d_v": fk.d_v, "h_v": fk.h_v, "confidence": fk.confidence}
        for fk in fused
    ]


@_wrap
def build_map_embedding(
    handle: int, fused: Sequence[dict], config: dict
) -> tuple[bytes, int, int]:
    """(row-major float64 buffer, rows, cols) for a fused keyword list.

    ``config`` is the EmbeddingConfig JSON object: {dim, view_count, d_n,
    seed, elevation_rows?}.
    """
    _graph(handle)  # validate the handle; the matrix depends on fused + config
    cfg = EmbeddingConfig(**config)
    embedder = KeywordEmbedder(dim=cfg.dim, seed=cfg.seed)
    matrix = _build_map_embedding(
        [
            FusedKeyword(
                label=fk["label"],
                d_v=fk["d_v"],
                h_v=fk["h_v"],
                confidence=fk["confidence"],
            )
            for fk in fused
        ],
        cfg,
        embedder,
    )
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    return matrix.tobytes(), matrix.shape[0], matrix.shape[1]


@_wrap
def serialize(handle: int) -> bytes:
    return _serialize(_graph(handle))


@_wrap
def load(data: bytes) -> int:
    graph = _deserialize(data)
    with _registry_lock:
        handle = next(_next_handle)
        _graphs[handle] = graph
    return handle
