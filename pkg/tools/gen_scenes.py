#!/usr/bin/env python3
"""Regenerate the bundled synthetic scenes and tours.

Run from the repository root:  python tools/gen_scenes.py
The output files are committed; this script only exists so they stay
reproducible and easy to tweak.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "omninav" / "data"


def dump(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def grid_scene() -> dict:
    """5x5 grid, 2 m spacing, 4-neighbour edges: plenty of branching."""
    viewpoints = []
    edges = []
    for r in range(5):
        for c in range(5):
            viewpoints.append({"id": f"g{r}{c}", "position": [2.0 * c, 2.0 * r]})
            if c + 1 < 5:
                edges.append([f"g{r}{c}", f"g{r}{c + 1}"])
            if r + 1 < 5:
                edges.append([f"g{r}{c}", f"g{r + 1}{c}"])
    objects = [
        {"label": "sofa", "position": [4.0, 0.0], "base_confidence": 0.9, "visibility_radius": 3.0},
        {"label": "table", "position": [4.0, 4.0], "base_confidence": 0.9, "visibility_radius": 3.0},
        {"label": "lamp", "position": [8.0, 8.0], "base_confidence": 0.8, "visibility_radius": 3.0},
        {"label": "plant", "position": [0.0, 8.0], "base_confidence": 0.85, "visibility_radius": 3.0},
        {"label": "bed", "position": [8.0, 0.0], "base_confidence": 0.9, "visibility_radius": 3.0},
        {"label": "chair", "position": [0.0, 4.0], "base_confidence": 0.7, "visibility_radius": 3.0},
    ]
    return {
        "type": "discrete",
        "scene_id": "grid",
        "viewpoints": viewpoints,
        "edges": edges,
        "objects": objects,
    }


def grid_tour() -> dict:
    def staircase(r0, c0, r1, c1):
        """Monotone row-then-column walk; metrically shortest on the grid."""
        path = [f"g{r0}{c0}"]
        r, c = r0, c0
        while c != c1:
            c += 1 if c1 > c else -1
            path.append(f"g{r}{c}")
        while r != r1:
            r += 1 if r1 > r else -1
            path.append(f"g{r}{c}")
        return path

    episodes = [
        {
            "id": "grid-ep1",
            "instruction": "Head past the sofa and stop at the table in the middle of the room.",
            "gt_path": staircase(0, 0, 4, 4),
        },
        {
            "id": "grid-ep2",
            "instruction": "Walk to the plant in the corner.",
            "gt_path": staircase(4, 4, 4, 0),
        },
        {
            "id": "grid-ep3",
            "instruction": "Go back to the bed and wait by the chair.",
            "gt_path": staircase(4, 0, 0, 4),
        },
    ]
    return {"scene_id": "grid", "tour_id": "grid-tour", "episodes": episodes}


def ring_scene() -> dict:
    """Hub-and-ring: 8 rim viewpoints around a center, spokes + rim edges."""
    viewpoints = [{"id": "hub", "position": [0.0, 0.0]}]
    edges = []
    for k in range(8):
        angle = math.radians(45.0 * k)
        x = round(4.0 * math.sin(angle), 12)
        y = round(4.0 * math.cos(angle), 12)
        viewpoints.append({"id": f"rim{k}", "position": [x, y]})
        edges.append(["hub", f"rim{k}"])
        edges.append([f"rim{k}", f"rim{(k + 1) % 8}"])
    objects = [
        {"label": "sink", "position": [0.0, 4.0], "base_confidence": 0.9, "visibility_radius": 3.5},
        {"label": "cabinet", "position": [0.0, -4.0], "base_confidence": 0.9, "visibility_radius": 3.5},
        {"label": "mirror", "position": [4.0, 0.0], "base_confidence": 0.8, "visibility_radius": 3.5},
    ]
    return {
        "type": "discrete",
        "scene_id": "ring",
        "viewpoints": viewpoints,
        "edges": edges,
        "objects": objects,
    }


def ring_tour() -> dict:
    episodes = [
        {
            "id": "ring-ep1",
            "instruction": "Cross the room to the sink.",
            "gt_path": ["rim4", "hub", "rim0"],
        },
        {
            "id": "ring-ep2",
            "instruction": "Return past the mirror to the cabinet.",
            "gt_path": ["rim0", "hub", "rim4"],
        },
    ]
    return {"scene_id": "ring", "tour_id": "ring-tour", "episodes": episodes}


def apartment_scene() -> dict:
    """12 x 10 m free rectangle with one central obstacle block."""
    objects = [
        {"label": "sofa", "position": [2.0, 2.0], "base_confidence": 0.9, "visibility_radius": 2.5},
        {"label": "lamp", "position": [10.0, 8.0], "base_confidence": 0.8, "visibility_radius": 2.5},
        {"label": "plant", "position": [10.0, 2.0], "base_confidence": 0.85, "visibility_radius": 2.5},
        {"label": "bed", "position": [2.0, 8.0], "base_confidence": 0.9, "visibility_radius": 2.5},
    ]
    return {
        "type": "continuous",
        "scene_id": "apartment",
        "bounds": [12.0, 10.0],
        "obstacles": [[5.0, 4.0, 7.0, 6.0]],
        "objects": objects,
        "step_length": 0.25,
        "turn_increment": 30.0,
    }


def apartment_tour() -> dict:
    def line(x0, y0, x1, y1):
        """0.25 m spaced waypoints along an axis-aligned segment."""
        steps = int(round(max(abs(x1 - x0), abs(y1 - y0)) / 0.25))
        return [
            {"position": [round(x0 + (x1 - x0) * i / steps, 10),
                          round(y0 + (y1 - y0) * i / steps, 10)]}
            for i in range(steps + 1)
        ]

    ep1 = line(1.0, 1.0, 11.0, 1.0)  # south corridor, below the obstacle
    ep2 = line(11.0, 1.0, 11.0, 9.0)  # east corridor, right of the obstacle
    episodes = [
        {"id": "apt-ep1", "instruction": "Walk past the sofa toward the plant.", "gt_path": ep1},
        {"id": "apt-ep2", "instruction": "Continue along the wall to the lamp.", "gt_path": ep2},
    ]
    return {"scene_id": "apartment", "tour_id": "apartment-tour", "episodes": episodes}


def main() -> None:
    dump(OUT / "scenes" / "grid.json", grid_scene())
    dump(OUT / "tours" / "grid.json", grid_tour())
    dump(OUT / "scenes" / "ring.json", ring_scene())
    dump(OUT / "tours" / "ring.json", ring_tour())
    dump(OUT / "scenes" / "apartment.json", apartment_scene())
    dump(OUT / "tours" / "apartment.json", apartment_tour())


if __name__ == "__main__":
    main()
