"""Synthetic navigation scenes.

Discrete scenes are viewpoint graphs with positions and adjacency, the
classic panoramic-navigation abstraction. Continuous scenes are a rectangular
free space with axis-aligned box obstacles; the agent moves in fixed-length
steps and fixed turn increments. Both carry scripted scene objects that
drive the mock detector.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from ..detection import SceneObject, SceneView, Panorama
from ..errors import ParseError, SceneMismatch, UnknownViewpoint
from ..geometry import bearing_deg, euclid, normalize_deg

STEP_LENGTH_M = 0.25
TURN_INCREMENT_DEG = 30.0


@dataclass
class DiscreteScene:
    scene_id: str
    positions: dict[str, tuple[float, ...]]
    adjacency: dict[str, set[str]]
    objects: tuple[SceneObject, ...] = ()

    def neighbours(self, vid: str) -> list[str]:
        if vid not in self.positions:
            raise UnknownViewpoint(vid)
        return sorted(self.adjacency.get(vid, ()))

    def position(self, vid: str) -> tuple[float, ...]:
        if vid not in self.positions:
            raise UnknownViewpoint(vid)
        return self.positions[vid]

    def bearing(self, a: str, b: str) -> float:
        return bearing_deg(self.position(a), self.position(b))

    def view_index(self, a: str, b: str, view_count: int = 12) -> int:
        """Quantized direction of the move a -> b as one of view_count bins."""
        step = 360.0 / view_count
        return int(round(self.bearing(a, b) / step)) % view_count

    def shortest_path(self, a: str, b: str) -> list[str]:
        """Metrically shortest path (Dijkstra over edge lengths, id tie-break)."""
        import heapq

        if a not in self.positions:
            raise UnknownViewpoint(a)
        if b not in self.positions:
            raise UnknownViewpoint(b)
        dist: dict[str, float] = {a: 0.0}
        parent: dict[str, str] = {}
        heap: list[tuple[float, str]] = [(0.0, a)]
        done: set[str] = set()
        while heap:
            d, cur = heapq.heappop(heap)
            if cur in done:
                continue
            done.add(cur)
            if cur == b:
                break
            for nxt in sorted(self.adjacency.get(cur, ())):
                nd = d + euclid(self.positions[cur], self.positions[nxt])
                if nxt not in dist or nd < dist[nxt] - 1e-12:
                    dist[nxt] = nd
                    parent[nxt] = cur
                    heapq.heappush(heap, (nd, nxt))
        if b not in dist:
            raise UnknownViewpoint(f"no path {a} -> {b}")
        path = [b]
        while path[-1] != a:
            path.append(parent[path[-1]])
        path.reverse()
        return path

    def shortest_path_length(self, a: str, b: str) -> float:
        path = self.shortest_path(a, b)
        return sum(
            euclid(self.positions[path[i]], self.positions[path[i + 1]])
            for i in range(len(path) - 1)
        )

    def panorama(self, vid: str, heading_deg: float, width: int, height: int) -> Panorama:
        return Panorama(
            width_px=width,
            height_px=height,
            agent_heading_deg=normalize_deg(heading_deg),
            content=SceneView(objects=self.objects, agent_position=self.position(vid)),
        )


@dataclass
class ContinuousScene:
    scene_id: str
    bounds: tuple[float, float]  # free space is [0, w] x [0, h]
    obstacles: tuple[tuple[float, float, float, float], ...] = ()
    objects: tuple[SceneObject, ...] = ()
    step_length: float = STEP_LENGTH_M
    turn_increment: float = TURN_INCREMENT_DEG

    def in_free_space(self, pos: tuple[float, float]) -> bool:
        x, y = pos[0], pos[1]
        if not (0.0 <= x <= self.bounds[0] and 0.0 <= y <= self.bounds[1]):
            return False
        for x0, y0, x1, y1 in self.obstacles:
            if x0 <= x <= x1 and y0 <= y <= y1:
                return False
        return True

    def step_from(self, pos: tuple[float, float], heading_deg: float) -> tuple[float, float]:
        """One forward step; a blocked move leaves the position unchanged."""
        rad = math.radians(heading_deg)
        target = (pos[0] + self.step_length * math.sin(rad),
                  pos[1] + self.step_length * math.cos(rad))
        return target if self.in_free_space(target) else pos

    def panorama(self, pos: tuple[float, ...], heading_deg: float, width: int, height: int) -> Panorama:
        return Panorama(
            width_px=width,
            height_px=height,
            agent_heading_deg=normalize_deg(heading_deg),
            content=SceneView(objects=self.objects, agent_position=tuple(pos)),
        )


Scene = DiscreteScene | ContinuousScene


def is_continuous(scene: Scene) -> bool:
    return isinstance(scene, ContinuousScene)


def load_scene(path: str | Path) -> Scene:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"scene file {path}: {exc.msg}", offset=exc.pos) from exc
    return scene_from_payload(data)


def scene_from_payload(data: dict) -> Scene:
    try:
        kind = data["type"]
        objects = tuple(
            SceneObject(
                label=o["label"],
                position=tuple(o["position"]),
                base_confidence=o["base_confidence"],
                visibility_radius=o["visibility_radius"],
            )
            for o in data.get("objects", [])
        )
        if kind == "discrete":
            positions = {v["id"]: tuple(v["position"]) for v in data["viewpoints"]}
            adjacency: dict[str, set[str]] = {vid: set() for vid in positions}
            for a, b in data["edges"]:
                if a not in positions or b not in positions:
                    raise SceneMismatch(f"edge ({a}, {b}) references unknown viewpoint")
                adjacency[a].add(b)
                adjacency[b].add(a)
            return DiscreteScene(
                scene_id=data["scene_id"],
                positions=positions,
                adjacency=adjacency,
                objects=objects,
            )
        if kind == "continuous":
            return ContinuousScene(
                scene_id=data["scene_id"],
                bounds=tuple(data["bounds"]),
                obstacles=tuple(tuple(o) for o in data.get("obstacles", [])),
                objects=objects,
                step_length=data.get("step_length", STEP_LENGTH_M),
                turn_increment=data.get("turn_increment", TURN_INCREMENT_DEG),
            )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed scene payload: {exc}") from exc
    raise ParseError(f"unknown scene type {data.get('type')!r}")
