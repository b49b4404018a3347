from .agents import NoisyAgent, OracleAgent, make_agent
from .ordering import order_episodes_into_tour, ordering_cost
from .scene import ContinuousScene, DiscreteScene, Scene, is_continuous, load_scene, scene_from_payload
from .tour import (
    Episode,
    EpisodeLog,
    PhaseTrace,
    Pose,
    Tour,
    TourLog,
    TourMemory,
    discover_viewpoint,
    load_tour,
    run_tour,
    tour_from_payload,
    trigger_lazy_detection,
)

__all__ = [
    "ContinuousScene",
    "DiscreteScene",
    "Episode",
    "EpisodeLog",
    "NoisyAgent",
    "OracleAgent",
    "PhaseTrace",
    "Pose",
    "Scene",
    "Tour",
    "TourLog",
    "TourMemory",
    "discover_viewpoint",
    "is_continuous",
    "load_scene",
    "load_tour",
    "make_agent",
    "order_episodes_into_tour",
    "ordering_cost",
    "run_tour",
    "scene_from_payload",
    "tour_from_payload",
    "trigger_lazy_detection",
]
