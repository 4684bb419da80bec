"""Run configuration: defaults, config-file loading, flag overrides.

Precedence is defaults < config file < explicit CLI flags.  The full
effective configuration is captured in batch manifests so any run can be
reproduced from its outputs.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

from .errors import MissingFile, SchemaViolation
from .layout import JitterConfig, LayoutConfig


@dataclass
class Config:
    size: int = 256
    background: str = "White"
    images_per_prompt: int = 4
    diversify: bool = True
    workers: int = 1

    vfov_deg: float = 50.0
    camera_distance: float = 5.0
    camera_height: float = 1.5
    camera_height_depth: float = 2.5
    fixed_distance: float | None = None

    jitter_camera_pos: float = 0.25
    jitter_look_at: float = 0.10
    jitter_yaw_deg: float = 15.0
    jitter_split_delta: float = 0.15
    jitter_max_attempts: int = 16

    canny_low: float = 50.0
    canny_high: float = 150.0
    far_clip: float = 20.0
    depth_convention: str = "metric"

    def layout_config(self) -> LayoutConfig:
        return LayoutConfig(
            vfov_deg=self.vfov_deg,
            camera_distance=self.camera_distance,
            camera_height=self.camera_height,
            camera_height_depth=self.camera_height_depth,
            fixed_distance=self.fixed_distance,
        )

    def jitter_config(self) -> JitterConfig:
        return JitterConfig(
            camera_pos=self.jitter_camera_pos,
            look_at=self.jitter_look_at,
            yaw_deg=self.jitter_yaw_deg,
            split_delta=self.jitter_split_delta,
            max_attempts=self.jitter_max_attempts,
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replaced(self, **overrides) -> "Config":
        known = {f.name for f in dataclasses.fields(self)}
        for key in overrides:
            if key not in known:
                raise SchemaViolation(f"unknown config field {key!r}", field=key)
        return dataclasses.replace(self, **overrides)

    @classmethod
    def from_file(cls, path: str) -> "Config":
        if not os.path.isfile(path):
            raise MissingFile(f"config file not found: {path}", path=path)
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"config file is not valid JSON: {exc}",
                                      field="<root>")
        if not isinstance(data, dict):
            raise SchemaViolation("config root must be an object", field="<root>")
        return cls().replaced(**{k: (tuple(v) if isinstance(v, list) else v)
                                 for k, v in data.items()})
