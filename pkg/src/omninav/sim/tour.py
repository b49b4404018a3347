"""Tour execution: the three-phase episode loop over a persistent memory.

A tour is an ordered list of episodes in one scene. Per episode the agent
first navigates under its own policy (instruction-driven), is then
teleoperated to the true goal, and finally teleoperated to the next
episode's start. The omnigraph memory persists across episodes within a
tour and is discarded between tours.

Detection runs only in the navigation phase (oracle phases have no
instruction, hence no keywords); graph structure still grows during oracle
phases. A config flag re-enables detection there with the previous
instruction's keywords, for experimentation.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

from ..config import EngineConfig
from ..detection import Detector, MockDetector, detect
from ..errors import AgentFailure, ParseError, SceneMismatch, UnknownViewpoint
from ..geometry import bearing_deg, euclid, normalize_deg, path_length
from ..graph import Omnigraph, Viewpoint
from ..keywords import extract_keywords_rule_based
from .scene import ContinuousScene, DiscreteScene, Scene, is_continuous

PHASE_NAVIGATION = "navigation"
PHASE_ORACLE_GOAL = "oracle_goal"
PHASE_ORACLE_START = "oracle_start"


@dataclass(frozen=True)
class Pose:
    """A position plus facing; discrete scenes also name the viewpoint."""

    position: tuple[float, ...]
    heading_deg: float = 0.0
    viewpoint: str | None = None

    def as_dict(self) -> dict:
        out: dict = {"position": list(self.position), "heading_deg": self.heading_deg}
        if self.viewpoint is not None:
            out["viewpoint"] = self.viewpoint
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Pose":
        return cls(
            position=tuple(data["position"]),
            heading_deg=data.get("heading_deg", 0.0),
            viewpoint=data.get("viewpoint"),
        )


@dataclass(frozen=True)
class Episode:
    id: str
    instruction: str
    start: Pose
    goal: Pose
    gt_path: tuple[Pose, ...]
    scene_id: str | None = None
    shortest_path_length: float | None = None

    def __post_init__(self):
        if not self.gt_path:
            raise ValueError(f"episode {self.id}: empty ground-truth path")
        if euclid(self.gt_path[0].position, self.start.position) > 1e-9:
            raise ValueError(f"episode {self.id}: gt_path does not begin at start")
        if euclid(self.gt_path[-1].position, self.goal.position) > 1e-9:
            raise ValueError(f"episode {self.id}: gt_path does not end at goal")

    @property
    def optimal_length(self) -> float:
        if self.shortest_path_length is not None:
            return self.shortest_path_length
        return path_length([p.position for p in self.gt_path])


@dataclass(frozen=True)
class Tour:
    scene_id: str
    episodes: tuple[Episode, ...]
    tour_id: str = ""

    def __post_init__(self):
        for ep in self.episodes:
            if ep.scene_id is not None and ep.scene_id != self.scene_id:
                raise SceneMismatch(
                    f"episode {ep.id} belongs to {ep.scene_id}, tour to {self.scene_id}"
                )
        if not self.tour_id:
            object.__setattr__(self, "tour_id", f"tour-{self.scene_id}")


@dataclass
class PhaseTrace:
    phase: str
    poses: list[Pose]
    detections_recorded: bool


@dataclass
class EpisodeLog:
    episode_id: str
    instruction: str
    keywords: tuple[str, ...]
    phases: list[PhaseTrace]
    executed_path: list[Pose]  # navigation phase only


@dataclass
class TourLog:
    tour_id: str
    scene_id: str
    episodes: list[EpisodeLog]
    graph: Omnigraph

    def to_payload(self) -> dict:
        return {
            "tour_id": self.tour_id,
            "scene_id": self.scene_id,
            "episodes": [
                {
                    "episode_id": ep.episode_id,
                    "instruction": ep.instruction,
                    "keywords": list(ep.keywords),
                    "phases": [
                        {
                            "phase": ph.phase,
                            "poses": [p.as_dict() for p in ph.poses],
                            "detections_recorded": ph.detections_recorded,
                        }
                        for ph in ep.phases
                    ],
                    "executed_path": [p.as_dict() for p in ep.executed_path],
                }
                for ep in self.episodes
            ],
            "graph": self.graph.to_payload(),
        }

    @classmethod
    def from_payload(cls, data: dict) -> "TourLog":
        try:
            episodes = [
                EpisodeLog(
                    episode_id=ep["episode_id"],
                    instruction=ep["instruction"],
                    keywords=tuple(ep["keywords"]),
                    phases=[
                        PhaseTrace(
                            phase=ph["phase"],
                            poses=[Pose.from_dict(p) for p in ph["poses"]],
                            detections_recorded=ph["detections_recorded"],
                        )
                        for ph in ep["phases"]
                    ],
                    executed_path=[Pose.from_dict(p) for p in ep["executed_path"]],
                )
                for ep in data["episodes"]
            ]
            return cls(
                tour_id=data["tour_id"],
                scene_id=data["scene_id"],
                episodes=episodes,
                graph=Omnigraph.from_payload(data["graph"]),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed tour log: {exc}") from exc


class Agent(Protocol):
    def navigate(self, scene: Scene, episode: Episode) -> list[Pose]: ...


@dataclass
class TourMemory:
    """Per-tour persistent state: the omnigraph plus discovery bookkeeping."""

    graph: Omnigraph
    panoramas: dict[str, Pose] = field(default_factory=dict)  # stored observations
    detected: set[tuple[str, str]] = field(default_factory=set)  # per-episode dedup
    vp_counter: int = 0
    last_vid: str | None = None

    def begin_episode(self) -> None:
        self.detected.clear()


def discover_viewpoint(memory: TourMemory, pose: Pose, d_vp: float) -> str | None:
    """Register a new viewpoint iff the pose clears every recorded one by d_vp.

    Stores the registration pose so detection can run lazily against the
    observations captured here. Returns the new id, or None when an existing
    viewpoint is within range.
    """
    for vp in memory.graph.nodes.values():
        if vp.position is not None and euclid(vp.position, pose.position) <= d_vp:
            return None
    vid = f"c{memory.vp_counter:05d}"
    memory.vp_counter += 1
    memory.graph.add_viewpoint(Viewpoint(id=vid, position=tuple(pose.position)))
    memory.panoramas[vid] = pose
    return vid


def keyword_set_hash(keywords: Sequence[str]) -> str:
    blob = "\x00".join(sorted(keywords))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def trigger_lazy_detection(
    memory: TourMemory,
    pos: Sequence[float],
    d_det: float,
    keywords: Sequence[str],
    detector: Detector,
    scene: ContinuousScene,
    cfg: EngineConfig,
) -> list[tuple[str, list]]:
    """Detect at every stored viewpoint the agent is within d_det of.

    Detection uses the panorama stored at registration time, not the current
    pose. A (viewpoint, keyword-set) pair fires at most once per episode.
    """
    if not keywords:
        return []
    kw_hash = keyword_set_hash(keywords)
    fired = []
    for vid in sorted(memory.panoramas):
        stored = memory.panoramas[vid]
        if euclid(pos, stored.position) >= d_det:
            continue
        key = (vid, kw_hash)
        if key in memory.detected:
            continue
        memory.detected.add(key)
        pano = scene.panorama(
            stored.position, stored.heading_deg, cfg.pano_width, cfg.pano_height
        )
        dets = detect(detector, pano, list(keywords))
        memory.graph.record_arrival(prev=None, curr=memory.graph.nodes[vid], dets=dets)
        fired.append((vid, dets))
    return fired


Extractor = Callable[[str], Sequence[str]]


def default_extractor(instruction: str) -> Sequence[str]:
    return extract_keywords_rule_based(instruction).keywords


def run_tour(
    scene: Scene,
    agent: Agent,
    tour: Tour,
    cfg: EngineConfig | None = None,
    detector: Detector | None = None,
    extractor: Extractor | None = None,
) -> TourLog:
    """Execute a tour and return its full log with the final memory snapshot.

    Memory is created here and lives exactly as long as the call, so separate
    tours never share state.
    """
    cfg = cfg or EngineConfig()
    detector = detector or MockDetector()
    extractor = extractor or default_extractor
    if tour.scene_id != scene.scene_id:
        raise SceneMismatch(f"tour {tour.scene_id!r} vs scene {scene.scene_id!r}")

    memory = TourMemory(graph=Omnigraph(scene.scene_id))
    runner = _PhaseRunner(scene, memory, detector, cfg)
    episode_logs = []
    for index, episode in enumerate(tour.episodes):
        memory.begin_episode()
        keywords = tuple(extractor(episode.instruction))
        try:
            executed = list(agent.navigate(scene, episode))
        except Exception as exc:  # noqa: BLE001 - agent code is foreign
            raise AgentFailure(str(exc), episode_index=index) from exc
        if not executed:
            raise AgentFailure("agent produced an empty path", episode_index=index)

        phases = [runner.run_phase(PHASE_NAVIGATION, executed, keywords)]
        oracle_goal = runner.teleoperate(executed[-1], episode.goal)
        phases.append(
            runner.run_phase(
                PHASE_ORACLE_GOAL,
                oracle_goal,
                keywords if cfg.detect_in_oracle_phases else (),
            )
        )
        if index + 1 < len(tour.episodes):
            oracle_start = runner.teleoperate(oracle_goal[-1], tour.episodes[index + 1].start)
            phases.append(
                runner.run_phase(
                    PHASE_ORACLE_START,
                    oracle_start,
                    keywords if cfg.detect_in_oracle_phases else (),
                )
            )
        episode_logs.append(
            EpisodeLog(
                episode_id=episode.id,
                instruction=episode.instruction,
                keywords=keywords,
                phases=phases,
                executed_path=executed,
            )
        )
    return TourLog(
        tour_id=tour.tour_id,
        scene_id=scene.scene_id,
        episodes=episode_logs,
        graph=memory.graph,
    )


class _PhaseRunner:
    """Replays pose sequences into the memory with the phase's detection rule."""

    def __init__(self, scene: Scene, memory: TourMemory, detector: Detector, cfg: EngineConfig):
        self.scene = scene
        self.memory = memory
        self.detector = detector
        self.cfg = cfg
        self.continuous = is_continuous(scene)

    def run_phase(
        self, phase: str, poses: Sequence[Pose], keywords: Sequence[str]
    ) -> PhaseTrace:
        with_detection = bool(keywords)
        for pose in poses:
            if self.continuous:
                self._arrive_continuous(pose, keywords)
            else:
                self._arrive_discrete(pose, keywords)
        return PhaseTrace(phase=phase, poses=list(poses), detections_recorded=with_detection)

    def _arrive_discrete(self, pose: Pose, keywords: Sequence[str]) -> None:
        if pose.viewpoint is None:
            raise UnknownViewpoint(f"discrete pose without viewpoint at {pose.position}")
        scene: DiscreteScene = self.scene
        vp = Viewpoint(id=pose.viewpoint, position=scene.position(pose.viewpoint))
        dets = []
        if keywords:
            pano = scene.panorama(
                pose.viewpoint, pose.heading_deg, self.cfg.pano_width, self.cfg.pano_height
            )
            dets = detect(self.detector, pano, list(keywords))
        self.memory.graph.record_arrival(prev=self.memory.last_vid, curr=vp, dets=dets)
        self.memory.last_vid = pose.viewpoint

    def _arrive_continuous(self, pose: Pose, keywords: Sequence[str]) -> None:
        new_vid = discover_viewpoint(self.memory, pose, self.cfg.d_vp)
        if new_vid is not None:
            if self.memory.last_vid is not None:
                self.memory.graph.record_arrival(
                    prev=self.memory.last_vid, curr=self.memory.graph.nodes[new_vid]
                )
            self.memory.last_vid = new_vid
        if keywords:
            trigger_lazy_detection(
                self.memory,
                pose.position,
                self.cfg.d_det,
                keywords,
                self.detector,
                self.scene,
                self.cfg,
            )

    def teleoperate(self, start: Pose, target: Pose) -> list[Pose]:
        """Oracle movement from start to target, both poses included."""
        if self.continuous:
            return self._teleoperate_continuous(start, target)
        scene: DiscreteScene = self.scene
        if start.viewpoint is None or target.viewpoint is None:
            raise UnknownViewpoint("oracle teleoperation needs viewpoint poses")
        ids = scene.shortest_path(start.viewpoint, target.viewpoint)
        poses = [start]
        for prev, cur in zip(ids, ids[1:]):
            poses.append(
                Pose(
                    position=scene.position(cur),
                    heading_deg=scene.bearing(prev, cur),
                    viewpoint=cur,
                )
            )
        return poses

    def _teleoperate_continuous(self, start: Pose, target: Pose) -> list[Pose]:
        scene: ContinuousScene = self.scene
        poses = [start]
        pos = tuple(start.position)
        goal = tuple(target.position)
        remaining = euclid(pos, goal)
        cap = int(math.ceil(remaining / scene.step_length)) * 4 + 8
        for _ in range(cap):
            if euclid(pos, goal) <= scene.step_length + 1e-9:
                if euclid(pos, goal) > 1e-12:
                    poses.append(Pose(position=goal, heading_deg=bearing_deg(pos, goal)))
                break
            heading = bearing_deg(pos, goal)
            nxt = scene.step_from(pos, heading)
            if nxt == pos:
                # blocked straight line: probe rotated headings, nearest first
                for delta in (30, -30, 60, -60, 90, -90, 120, -120, 150, -150, 180):
                    h = normalize_deg(heading + delta)
                    nxt = scene.step_from(pos, h)
                    if nxt != pos:
                        heading = h
                        break
                else:
                    break
            pos = nxt
            poses.append(Pose(position=pos, heading_deg=heading))
        return poses


# -- tour file I/O -----------------------------------------------------------


def load_tour(path: str | Path, scene: Scene | None = None) -> Tour:
    """Load a tour file, resolving discrete viewpoint poses against the scene."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"tour file {path}: {exc.msg}", offset=exc.pos) from exc
    return tour_from_payload(data, scene)


def tour_from_payload(data: dict, scene: Scene | None = None) -> Tour:
    def resolve(pose_data) -> tuple[Pose, bool]:
        """(pose, heading-was-explicit)"""
        if isinstance(pose_data, str):
            if scene is None or is_continuous(scene):
                raise SceneMismatch("viewpoint pose requires a discrete scene")
            return Pose(position=scene.position(pose_data), viewpoint=pose_data), False
        if isinstance(pose_data, dict):
            vid = pose_data.get("viewpoint")
            if vid is not None and "position" not in pose_data:
                if scene is None or is_continuous(scene):
                    raise SceneMismatch("viewpoint pose requires a discrete scene")
                return (
                    Pose(
                        position=scene.position(vid),
                        heading_deg=pose_data.get("heading_deg", 0.0),
                        viewpoint=vid,
                    ),
                    "heading_deg" in pose_data,
                )
            return Pose.from_dict(pose_data), "heading_deg" in pose_data
        raise ParseError(f"unreadable pose {pose_data!r}")

    def resolve_path(items) -> tuple[Pose, ...]:
        """Fill unspecified headings with the bearing of the arriving move."""
        resolved = [resolve(p) for p in items]
        poses = [p for p, _ in resolved]
        out = []
        for i, (pose, explicit) in enumerate(resolved):
            if explicit or len(poses) == 1:
                out.append(pose)
                continue
            ref = (poses[i - 1].position, pose.position) if i > 0 else (
                pose.position,
                poses[1].position,
            )
            heading = bearing_deg(*ref) if euclid(*ref) > 1e-12 else (
                out[-1].heading_deg if out else 0.0
            )
            out.append(Pose(position=pose.position, heading_deg=heading, viewpoint=pose.viewpoint))
        return tuple(out)

    try:
        scene_id = data["scene_id"]
        episodes = []
        for ep in data["episodes"]:
            gt = resolve_path(ep["gt_path"])
            start = resolve(ep["start"])[0] if "start" in ep else gt[0]
            goal = resolve(ep["goal"])[0] if "goal" in ep else gt[-1]
            episodes.append(
                Episode(
                    id=ep["id"],
                    instruction=ep["instruction"],
                    start=start,
                    goal=goal,
                    gt_path=gt,
                    scene_id=scene_id,
                    shortest_path_length=ep.get("shortest_path_length"),
                )
            )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed tour payload: {exc}") from exc
    return Tour(scene_id=scene_id, episodes=tuple(episodes), tour_id=data.get("tour_id", ""))
