"""Scripted navigation agents for exercising the tour machinery.

The oracle agent reproduces the ground-truth path exactly; the noisy agent
deviates at each step with a fixed probability and rejoins the reference via
the shortest route. Both are deterministic given their construction
arguments, which keeps whole tour runs replayable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..geometry import bearing_deg, euclid, normalize_deg
from .scene import ContinuousScene, DiscreteScene, Scene, is_continuous
from .tour import Episode, Pose


@dataclass
class OracleAgent:
    """Follows the ground-truth path pose for pose."""

    def navigate(self, scene: Scene, episode: Episode) -> list[Pose]:
        return list(episode.gt_path)


@dataclass
class NoisyAgent:
    """Oracle follower that wanders off with probability p at each step.

    After a deviation it heads back toward the next unreached ground-truth
    waypoint along the shortest route. The walk is capped so a high p cannot
    loop forever; the seed (mixed with the episode id) fixes every choice.
    """

    p: float
    seed: int = 0

    def navigate(self, scene: Scene, episode: Episode) -> list[Pose]:
        rng = random.Random(f"{self.seed}:{episode.id}")
        if is_continuous(scene):
            return self._navigate_continuous(scene, episode, rng)
        return self._navigate_discrete(scene, episode, rng)

    def _navigate_discrete(
        self, scene: DiscreteScene, episode: Episode, rng: random.Random
    ) -> list[Pose]:
        gt = [p.viewpoint for p in episode.gt_path]
        if any(v is None for v in gt):
            raise ValueError("discrete ground-truth path must name viewpoints")
        cur = gt[0]
        poses = [episode.gt_path[0]]
        idx = 1
        cap = 4 * len(gt) + 20
        while idx < len(gt) and len(poses) < cap:
            if rng.random() < self.p:
                nxt = rng.choice(scene.neighbours(cur))
            else:
                hop = scene.shortest_path(cur, gt[idx])
                nxt = hop[1] if len(hop) > 1 else gt[idx]
            poses.append(
                Pose(
                    position=scene.position(nxt),
                    heading_deg=scene.bearing(cur, nxt),
                    viewpoint=nxt,
                )
            )
            cur = nxt
            while idx < len(gt) and cur == gt[idx]:
                idx += 1
        return poses

    def _navigate_continuous(
        self, scene: ContinuousScene, episode: Episode, rng: random.Random
    ) -> list[Pose]:
        waypoints = [p.position for p in episode.gt_path]
        pos = tuple(waypoints[0])
        poses = [episode.gt_path[0]]
        idx = 1
        steps = 0
        cap = 4 * len(waypoints) + 40
        headings = [i * scene.turn_increment for i in range(int(360 / scene.turn_increment))]
        while idx < len(waypoints) and steps < cap:
            steps += 1
            if rng.random() < self.p:
                heading = rng.choice(headings)
                nxt = scene.step_from(pos, heading)
            else:
                target = tuple(waypoints[idx])
                heading = bearing_deg(pos, target)
                if euclid(pos, target) <= scene.step_length + 1e-9:
                    nxt = target
                else:
                    nxt = scene.step_from(pos, heading)
            if nxt != pos:
                poses.append(Pose(position=tuple(nxt), heading_deg=normalize_deg(heading)))
                pos = tuple(nxt)
            while idx < len(waypoints) and euclid(pos, waypoints[idx]) <= 1e-9:
                idx += 1
        return poses


def make_agent(spec: str, seed: int = 0):
    """Agent registry: "oracle" or "noisy:<p>"."""
    if spec == "oracle":
        return OracleAgent()
    if spec.startswith("noisy"):
        _, _, arg = spec.partition(":")
        return NoisyAgent(p=float(arg) if arg else 0.5, seed=seed)
    raise ValueError(f"unknown agent spec {spec!r}")
