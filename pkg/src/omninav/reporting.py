"""Shared report assembly: score a tour log and shape it for files/CLI."""

from __future__ import annotations

from .config import EngineConfig
from .metrics import episode_metrics, render_metrics_table, t_ndtw
from .sim.scene import DiscreteScene, Scene, is_continuous
from .sim.tour import Episode, Tour, TourLog


def episode_optimal_length(scene: Scene, episode: Episode) -> float:
    """Geodesic start-to-goal length used by the SPL denominator."""
    if episode.shortest_path_length is not None:
        return episode.shortest_path_length
    if not is_continuous(scene) and episode.start.viewpoint and episode.goal.viewpoint:
        assert isinstance(scene, DiscreteScene)
        return scene.shortest_path_length(episode.start.viewpoint, episode.goal.viewpoint)
    return episode.optimal_length


def score_tour(log: TourLog, tour: Tour, scene: Scene, cfg: EngineConfig) -> dict:
    """Per-episode metric rows plus the tour-level aggregate, as one payload."""
    rows = {}
    executed_paths = []
    reference_paths = []
    for ep_log, episode in zip(log.episodes, tour.episodes):
        executed = [p.position for p in ep_log.executed_path]
        reference = [p.position for p in episode.gt_path]
        result = episode_metrics(
            executed,
            reference,
            episode.goal.position,
            shortest_path_length=episode_optimal_length(scene, episode),
            success_radius=cfg.success_radius,
            d_th=cfg.d_th,
        )
        rows[ep_log.episode_id] = result.as_dict()
        executed_paths.append(executed)
        reference_paths.append(reference)
    tour_score = t_ndtw(
        [(executed_paths, reference_paths)],
        d_th=cfg.d_th,
        weighted=cfg.tour_weighting == "reference_length",
    )
    return {
        "tour_id": log.tour_id,
        "scene_id": log.scene_id,
        "episodes": rows,
        "t_ndtw": tour_score,
    }


def render_report(report: dict) -> str:
    return render_metrics_table(report["episodes"], report["t_ndtw"])
