"""Keyword detection: panoramic box geometry, detector interface, mock detector.

A detector answers "where do these keywords appear in this panorama". The
engine only consumes (label, box, confidence) triples and derives headings
itself from box geometry, so any detector that can fill a box is pluggable.
The built-in mock detector is driven by scripted scene ground truth and is
fully deterministic; external detectors attach over a line-delimited JSON
stdin/stdout stream.
"""

from __future__ import annotations

import json
import math
import subprocess
from dataclasses import dataclass, field, replace
from typing import Protocol, Sequence

from .errors import BoxOutOfBounds, DetectorUnavailable, InvalidDetection
from .geometry import bearing_deg, euclid, normalize_deg, normalize_signed_deg


def normalize_label(text: str) -> str:
    """Canonical keyword key: lowercase with internal whitespace collapsed."""
    return " ".join(text.lower().split())


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in panorama pixel coordinates."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise InvalidDetection(f"degenerate box {self}")
        if min(self.x_min, self.y_min) < 0:
            raise InvalidDetection(f"negative box coordinate {self}")

    @property
    def center_x(self) -> float:
        return (self.x_min + self.x_max) / 2.0

    @property
    def center_y(self) -> float:
        return (self.y_min + self.y_max) / 2.0

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass(frozen=True)
class Detection:
    """One detected keyword instance with its absolute heading."""

    label: str
    box: BoundingBox
    confidence: float
    heading_deg: float

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise InvalidDetection(f"confidence {self.confidence} outside [0, 1]")
        if not (0.0 <= self.heading_deg < 360.0):
            raise InvalidDetection(f"heading {self.heading_deg} outside [0, 360)")


@dataclass(frozen=True)
class SceneObject:
    """Mock-detector ground truth: a named object placed in the scene."""

    label: str
    position: tuple[float, ...]
    base_confidence: float
    visibility_radius: float

    def __post_init__(self):
        if not (0.0 <= self.base_confidence <= 1.0):
            raise InvalidDetection(f"base_confidence {self.base_confidence} outside [0, 1]")
        if self.visibility_radius <= 0:
            raise InvalidDetection("visibility_radius must be positive")


@dataclass(frozen=True)
class SceneView:
    """Content handle handed to the mock detector: objects + observer pose."""

    objects: tuple[SceneObject, ...]
    agent_position: tuple[float, ...]


@dataclass(frozen=True)
class Panorama:
    """A panoramic observation taken at a pose.

    ``content`` is opaque to the engine; the mock detector expects a
    :class:`SceneView`, external detectors get it serialized as-is.
    """

    width_px: int
    height_px: int
    agent_heading_deg: float
    content: object = None

    def __post_init__(self):
        if self.width_px < 1 or self.height_px < 1:
            raise InvalidDetection("panorama dimensions must be >= 1 px")


def relative_heading_from_box(box: BoundingBox, width_px: int) -> float:
    """Heading of a box center relative to the observer's facing, in [-180, 180).

    Column 0 of the panorama is 180 deg to the observer's left, the center
    column is dead ahead.
    """
    if box.x_max > width_px:
        raise BoxOutOfBounds(f"box {box} exceeds panorama width {width_px}")
    return (box.center_x / width_px) * 360.0 - 180.0


def elevation_from_box(box: BoundingBox, height_px: int) -> float:
    """Elevation of a box center over [-90, 90), analogous to the heading map."""
    if box.y_max > height_px:
        raise BoxOutOfBounds(f"box {box} exceeds panorama height {height_px}")
    return (box.center_y / height_px) * 180.0 - 90.0


def absolute_heading(rel_deg: float, agent_heading_deg: float) -> float:
    """Compose a relative heading with the observer's facing, into [0, 360)."""
    return normalize_deg(agent_heading_deg + rel_deg)


def filter_boxes_per_keyword(dets: Sequence[Detection]) -> list[Detection]:
    """Keep only the best box per distinct label.

    Best = highest confidence; ties broken by smaller heading, then smaller
    x_min, so the winner is unique for any input order.
    """
    best: dict[str, Detection] = {}
    for det in dets:
        cur = best.get(det.label)
        if cur is None or _det_rank(det) < _det_rank(cur):
            best[det.label] = det
    return [best[label] for label in sorted(best)]


def _det_rank(det: Detection) -> tuple[float, float, float]:
    return (-det.confidence, det.heading_deg, det.box.x_min)


class Detector(Protocol):
    """Open-vocabulary detection contract.

    Implementations must be deterministic for equal inputs and safe for
    concurrent ``detect`` calls over read-only scene state.
    """

    def detect(self, pano: Panorama, keywords: Sequence[str]) -> list[Detection]: ...


def detect(detector: Detector, pano: Panorama, keywords: Sequence[str]) -> list[Detection]:
    """Run a detector and enforce the shared output contract.

    Every returned detection is labelled with one of the queried keywords
    (after normalization) and carries a heading derived from its box.
    """
    if not keywords:
        raise InvalidDetection("detect requires a non-empty keyword list")
    wanted = {normalize_label(k) for k in keywords}
    out = []
    for det in detector.detect(pano, keywords):
        label = normalize_label(det.label)
        if label not in wanted:
            continue
        out.append(replace(det, label=label))
    return out


# Box extent synthesized by the mock detector, in pixels either side of center.
_MOCK_HALF_W = 20.0
_MOCK_HALF_H = 20.0


@dataclass
class MockDetector:
    """Deterministic detector over scripted scene objects.

    Confidence falls off linearly with observer distance and hits zero at the
    object's visibility radius; there is no angular occlusion. The box is
    placed at the panorama column implied by the object's bearing, so running
    the heading geometry on the output recovers that bearing (up to the
    column quantization of the synthesized box).
    """

    def detect(self, pano: Panorama, keywords: Sequence[str]) -> list[Detection]:
        view = pano.content
        if not isinstance(view, SceneView):
            raise DetectorUnavailable("mock detector needs a SceneView content handle")
        wanted = {normalize_label(k) for k in keywords}
        results = []
        for obj in view.objects:
            label = normalize_label(obj.label)
            if label not in wanted:
                continue
            dist = euclid(view.agent_position, obj.position)
            if dist >= obj.visibility_radius:
                continue
            confidence = obj.base_confidence * (1.0 - dist / obj.visibility_radius)
            box = self._box_for(obj, view, pano)
            rel = relative_heading_from_box(box, pano.width_px)
            heading = absolute_heading(rel, pano.agent_heading_deg)
            results.append(Detection(label=label, box=box, confidence=confidence, heading_deg=heading))
        return results

    def _box_for(self, obj: SceneObject, view: SceneView, pano: Panorama) -> BoundingBox:
        rel = normalize_signed_deg(
            bearing_deg(view.agent_position, obj.position) - pano.agent_heading_deg
        )
        cx = (rel + 180.0) / 360.0 * pano.width_px
        half_w = min(_MOCK_HALF_W, pano.width_px / 2.0)
        # Keep the box symmetric around cx where possible; shrink at the seam
        # so the derived heading stays exact away from the panorama edges.
        half_w = min(half_w, cx, pano.width_px - cx)
        if half_w <= 0.0:
            half_w = min(_MOCK_HALF_W, pano.width_px / 2.0)
            cx = half_w if cx < pano.width_px / 2.0 else pano.width_px - half_w
        elev = 0.0
        if len(obj.position) > 2 or len(view.agent_position) > 2:
            dz = (obj.position[2] if len(obj.position) > 2 else 0.0) - (
                view.agent_position[2] if len(view.agent_position) > 2 else 0.0
            )
            planar = euclid(view.agent_position[:2], obj.position[:2])
            elev = math.degrees(math.atan2(dz, planar)) if planar > 0 else 0.0
        cy = (elev + 90.0) / 180.0 * pano.height_px
        half_h = min(_MOCK_HALF_H, cy, pano.height_px - cy)
        if half_h <= 0.0:
            half_h = min(_MOCK_HALF_H, pano.height_px / 2.0)
            cy = half_h if cy < pano.height_px / 2.0 else pano.height_px - half_h
        return BoundingBox(cx - half_w, cy - half_h, cx + half_w, cy + half_h)


@dataclass
class StdioDetector:
    """Bridge to an external detector process speaking line-delimited JSON.

    One request object per line on stdin, one response per line on stdout:

        -> {"width_px":..,"height_px":..,"agent_heading_deg":..,"keywords":[..],"content":..}
        <- {"detections":[{"label":..,"box":[x0,y0,x1,y1],"confidence":..},..]}

    Headings are computed on this side from each returned box.
    """

    command: list[str]
    _proc: subprocess.Popen | None = field(default=None, repr=False)

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                )
            except OSError as exc:
                raise DetectorUnavailable(f"cannot start detector {self.command}: {exc}") from exc
        return self._proc

    def detect(self, pano: Panorama, keywords: Sequence[str]) -> list[Detection]:
        proc = self._ensure()
        request = {
            "width_px": pano.width_px,
            "height_px": pano.height_px,
            "agent_heading_deg": pano.agent_heading_deg,
            "keywords": list(keywords),
            "content": pano.content if _json_safe(pano.content) else None,
        }
        try:
            assert proc.stdin is not None and proc.stdout is not None
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise DetectorUnavailable(f"detector process failed: {exc}") from exc
        if not line:
            raise DetectorUnavailable("detector process closed its output stream")
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DetectorUnavailable(f"unreadable detector response: {exc}") from exc
        out = []
        for item in payload.get("detections", []):
            box = BoundingBox(*item["box"])
            rel = relative_heading_from_box(box, pano.width_px)
            out.append(
                Detection(
                    label=item["label"],
                    box=box,
                    confidence=item["confidence"],
                    heading_deg=absolute_heading(rel, pano.agent_heading_deg),
                )
            )
        return out

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.terminate()
            self._proc.wait(timeout=5)


def _json_safe(value) -> bool:
    try:
        json.dumps(value)
        return True
    except TypeError:
        return False


def make_detector(name: str, **kwargs) -> Detector:
    """Detector registry: "mock" built in, "stdio:<cmd...>" for external ones."""
    if name == "mock":
        return MockDetector()
    if name.startswith("stdio:"):
        return StdioDetector(command=name[len("stdio:"):].split())
    raise DetectorUnavailable(f"unknown detector {name!r}")
