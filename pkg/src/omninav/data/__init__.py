"""Bundled synthetic scenes and tours (regenerate via tools/gen_scenes.py)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

BUILTIN_SCENES = ("grid", "ring", "apartment")


def scene_path(name: str) -> Path:
    return _path("scenes", name)


def tour_path(name: str) -> Path:
    return _path("tours", name)


def _path(kind: str, name: str) -> Path:
    base = resources.files(__package__)
    p = Path(str(base / kind / f"{name}.json"))
    if not p.exists():
        raise FileNotFoundError(f"no bundled {kind[:-1]} named {name!r}")
    return p
