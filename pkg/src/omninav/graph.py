"""The omnigraph: viewpoint registry, undirected connectivity, keyword tables.

Nodes are viewpoints, each carrying at most one detection per keyword label
(the best one seen so far). Edges record traversed connectivity. The graph
persists across episodes within a tour and is the single mutable memory of
the engine; mutations must be serialized by the caller, reads may run
concurrently between mutations.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Sequence

from .detection import BoundingBox, Detection, normalize_label
from .errors import (
    InvalidDetection,
    MissingPosition,
    ParseError,
    PositionConflict,
    UnknownViewpoint,
)
from .geometry import euclid

ViewpointId = str

# Two positions closer than this are the same registered point.
POSITION_TOLERANCE_M = 1e-6


@dataclass
class Viewpoint:
    """A registered position with its keyword detection table.

    ``detections`` maps normalized label -> best Detection accepted so far;
    keys always equal the label stored inside the detection.
    """

    id: ViewpointId
    position: tuple[float, ...] | None = None
    detections: dict[str, Detection] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise UnknownViewpoint("viewpoint id must be non-empty")
        if self.position is not None:
            self.position = tuple(float(c) for c in self.position)

    def copy(self) -> "Viewpoint":
        return Viewpoint(self.id, self.position, dict(self.detections))


def update_keywords(vp: Viewpoint, dets: Sequence[Detection]) -> Viewpoint:
    """Union-merge a detection batch into a viewpoint's keyword table.

    Per label the higher-confidence detection wins; an exact confidence tie
    goes to the newer detection (later in the batch, and any batch beats the
    stored table). Returns a new Viewpoint; the input is not mutated.
    """
    merged = vp.copy()
    for det in dets:
        if not (0.0 <= det.confidence <= 1.0):
            raise InvalidDetection(f"confidence {det.confidence} outside [0, 1]")
        det = replace(det, label=normalize_label(det.label))
        cur = merged.detections.get(det.label)
        if cur is None or det.confidence >= cur.confidence:
            merged.detections[det.label] = det
    return merged


class Omnigraph:
    """Undirected graph of viewpoints with per-viewpoint keyword tables."""

    def __init__(self, scene_id: str):
        self.scene_id = scene_id
        self.nodes: dict[ViewpointId, Viewpoint] = {}
        self._edges: set[tuple[ViewpointId, ViewpointId]] = set()
        self._adj: dict[ViewpointId, set[ViewpointId]] = {}

    # -- structure ---------------------------------------------------------

    @property
    def edges(self) -> set[tuple[ViewpointId, ViewpointId]]:
        return set(self._edges)

    def neighbours(self, vid: ViewpointId) -> list[ViewpointId]:
        if vid not in self.nodes:
            raise UnknownViewpoint(vid)
        return sorted(self._adj.get(vid, ()))

    def add_viewpoint(self, vp: Viewpoint) -> "Omnigraph":
        """Register a viewpoint; re-adding an existing id is a no-op.

        The position of a re-added viewpoint must match the stored one within
        POSITION_TOLERANCE_M, otherwise the ids cannot denote the same place.
        """
        existing = self.nodes.get(vp.id)
        if existing is None:
            self.nodes[vp.id] = vp.copy()
            self._adj.setdefault(vp.id, set())
            return self
        if not _positions_match(existing.position, vp.position):
            raise PositionConflict(
                f"viewpoint {vp.id}: stored {existing.position}, got {vp.position}"
            )
        return self

    def add_edge(self, a: ViewpointId, b: ViewpointId) -> "Omnigraph":
        if a not in self.nodes:
            raise UnknownViewpoint(a)
        if b not in self.nodes:
            raise UnknownViewpoint(b)
        if a == b:
            return self
        self._edges.add(_canonical(a, b))
        self._adj[a].add(b)
        self._adj[b].add(a)
        return self

    def record_arrival(
        self,
        prev: ViewpointId | None,
        curr: Viewpoint,
        dets: Sequence[Detection] = (),
    ) -> "Omnigraph":
        """Register an arrival: add/match the node, link it to where we came
        from, and merge the arrival's detections into its keyword table.

        A tour's very first arrival has no ``prev`` and adds only the node.
        """
        if prev is not None and prev not in self.nodes:
            raise UnknownViewpoint(prev)
        self.add_viewpoint(curr)
        if prev is not None:
            self.add_edge(prev, curr.id)
        if dets:
            self.nodes[curr.id] = update_keywords(self.nodes[curr.id], dets)
        return self

    # -- neighbourhood queries ----------------------------------------------

    def neighbours_within_hops(
        self, origin: ViewpointId, d_n: int
    ) -> list[tuple[ViewpointId, int]]:
        """All nodes with BFS hop distance <= d_n, origin included at 0.

        Sorted by (hop distance, id) so the result is deterministic.
        """
        if origin not in self.nodes:
            raise UnknownViewpoint(origin)
        dist = {origin: 0}
        queue = deque([origin])
        while queue:
            cur = queue.popleft()
            if dist[cur] == d_n:
                continue
            for nxt in self._adj.get(cur, ()):
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    queue.append(nxt)
        return sorted(dist.items(), key=lambda kv: (kv[1], kv[0]))

    def neighbours_within_radius(
        self, pos: Sequence[float], d_n: float
    ) -> list[tuple[ViewpointId, float]]:
        """All nodes with Euclidean distance strictly below d_n.

        Sorted by (distance, id). Every node must carry a position.
        """
        out = []
        for vid in sorted(self.nodes):
            vp = self.nodes[vid]
            if vp.position is None:
                raise MissingPosition(vid)
            d = euclid(pos, vp.position)
            if d < d_n:
                out.append((vid, d))
        out.sort(key=lambda kv: (kv[1], kv[0]))
        return out

    def first_hops(self, origin: ViewpointId) -> dict[ViewpointId, ViewpointId]:
        """For every node reachable from origin, the first move of the
        canonical shortest path toward it.

        Among multiple shortest paths the lexicographically smallest first-hop
        id wins, so the map is deterministic. The origin is not included.
        """
        if origin not in self.nodes:
            raise UnknownViewpoint(origin)
        dist = {origin: 0}
        first: dict[ViewpointId, ViewpointId] = {}
        queue = deque([origin])
        while queue:
            cur = queue.popleft()
            for nxt in sorted(self._adj.get(cur, ())):
                cand = nxt if cur == origin else first[cur]
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    first[nxt] = cand
                    queue.append(nxt)
                elif dist[nxt] == dist[cur] + 1 and cand < first[nxt]:
                    first[nxt] = cand
        return first

    def shortest_path(self, a: ViewpointId, b: ViewpointId) -> list[ViewpointId]:
        """Canonical BFS shortest path (smallest-id tie-break), endpoints included."""
        if a not in self.nodes:
            raise UnknownViewpoint(a)
        if b not in self.nodes:
            raise UnknownViewpoint(b)
        if a == b:
            return [a]
        parent: dict[ViewpointId, ViewpointId] = {}
        dist = {a: 0}
        queue = deque([a])
        while queue:
            cur = queue.popleft()
            for nxt in sorted(self._adj.get(cur, ())):
                if nxt not in dist:
                    dist[nxt] = dist[cur] + 1
                    parent[nxt] = cur
                    queue.append(nxt)
        if b not in dist:
            raise UnknownViewpoint(f"no path {a} -> {b}")
        path = [b]
        while path[-1] != a:
            path.append(parent[path[-1]])
        path.reverse()
        return path

    # -- equality / serialization -------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Omnigraph):
            return NotImplemented
        return (
            self.scene_id == other.scene_id
            and self._edges == other._edges
            and {k: (v.position, v.detections) for k, v in self.nodes.items()}
            == {k: (v.position, v.detections) for k, v in other.nodes.items()}
        )

    def check_invariants(self) -> None:
        """Structural self-check; raises on a violated graph invariant."""
        for a, b in self._edges:
            assert a in self.nodes and b in self.nodes, f"dangling edge {(a, b)}"
            assert a != b, f"self-loop {a}"
            assert a < b, f"non-canonical edge {(a, b)}"
        for vp in self.nodes.values():
            for label, det in vp.detections.items():
                assert label == det.label, f"table key {label!r} != label {det.label!r}"

    def to_payload(self) -> dict:
        nodes = []
        for vid in sorted(self.nodes):
            vp = self.nodes[vid]
            entry: dict = {"id": vp.id}
            if vp.position is not None:
                entry["position"] = list(vp.position)
            entry["detections"] = [
                {
                    "label": det.label,
                    "box": det.box.as_list(),
                    "confidence": det.confidence,
                    "heading_deg": det.heading_deg,
                }
                for _, det in sorted(vp.detections.items())
            ]
            nodes.append(entry)
        return {
            "scene_id": self.scene_id,
            "nodes": nodes,
            "edges": [list(e) for e in sorted(self._edges)],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Omnigraph":
        try:
            graph = cls(payload["scene_id"])
            for entry in payload["nodes"]:
                vp = Viewpoint(
                    id=entry["id"],
                    position=tuple(entry["position"]) if "position" in entry else None,
                )
                for d in entry.get("detections", []):
                    det = Detection(
                        label=d["label"],
                        box=BoundingBox(*d["box"]),
                        confidence=d["confidence"],
                        heading_deg=d["heading_deg"],
                    )
                    vp.detections[det.label] = det
                graph.add_viewpoint(vp)
            for a, b in payload["edges"]:
                graph.add_edge(a, b)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed omnigraph payload: {exc}") from exc
        return graph


def serialize(graph: Omnigraph) -> bytes:
    """Byte-deterministic UTF-8 JSON: nodes sorted by id, edges by pair,
    detections by label."""
    return json.dumps(graph.to_payload(), ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def deserialize(data: bytes) -> Omnigraph:
    try:
        payload = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError("payload is not UTF-8", offset=exc.start) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(payload, dict):
        raise ParseError("top-level JSON value is not an object", offset=0)
    return Omnigraph.from_payload(payload)


def _canonical(a: ViewpointId, b: ViewpointId) -> tuple[ViewpointId, ViewpointId]:
    return (a, b) if a < b else (b, a)


def _positions_match(a: tuple[float, ...] | None, b: tuple[float, ...] | None) -> bool:
    if a is None and b is None:
        return True
    if a is None or b is None:
        return False
    return len(a) == len(b) and euclid(a, b) <= POSITION_TOLERANCE_M
