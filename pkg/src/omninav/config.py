"""Engine configuration: one JSON document holding every threshold.

Command-line flags override file values; the file path itself defaults to
the OMNINAV_CONFIG environment variable. Thresholds whose natural value
depends on the scene kind (the fusion neighbourhood d_n) stay unset until
resolved against a scene.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigInvalid

ENV_CONFIG_PATH = "OMNINAV_CONFIG"

DEFAULT_D_N_DISCRETE = 3
DEFAULT_D_N_CONTINUOUS = 7.0


@dataclass(frozen=True)
class EngineConfig:
    d_n: float | None = None  # hops (discrete) or meters (continuous); None = per-kind default
    d_vp: float = 1.0
    d_det: float = 0.25
    d_th: float = 3.0
    success_radius: float = 3.0
    view_count: int = 12
    embed_dim: int = 32
    seed: int = 0
    pano_width: int = 3600
    pano_height: int = 1800
    detector: str = "mock"  # or "stdio:<command...>"
    detect_in_oracle_phases: bool = False
    tour_weighting: str = "reference_length"  # or "uniform"

    def __post_init__(self):
        if self.d_det >= self.d_vp:
            raise ConfigInvalid(
                f"d_det ({self.d_det}) must be strictly below d_vp ({self.d_vp})"
            )
        if self.tour_weighting not in ("reference_length", "uniform"):
            raise ConfigInvalid(f"unknown tour_weighting {self.tour_weighting!r}")
        if self.view_count < 1:
            raise ConfigInvalid("view_count must be positive")

    def resolve_d_n(self, continuous: bool) -> float:
        if self.d_n is not None:
            return self.d_n
        return DEFAULT_D_N_CONTINUOUS if continuous else DEFAULT_D_N_DISCRETE

    def with_overrides(self, **overrides) -> "EngineConfig":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **clean)

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "EngineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigInvalid(f"config {path} is not a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)
