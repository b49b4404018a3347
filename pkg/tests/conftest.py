import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "det",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("det")


@pytest.fixture
def grid_pair():
    """(scene, tour) for the bundled grid scene."""
    from omninav.data import scene_path, tour_path
    from omninav.sim import load_scene, load_tour

    scene = load_scene(scene_path("grid"))
    return scene, load_tour(tour_path("grid"), scene)


@pytest.fixture
def apartment_pair():
    from omninav.data import scene_path, tour_path
    from omninav.sim import load_scene, load_tour

    scene = load_scene(scene_path("apartment"))
    return scene, load_tour(tour_path("apartment"), scene)
