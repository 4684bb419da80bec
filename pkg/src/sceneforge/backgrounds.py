"""Procedural environment panoramas and floor textures.

The environment is a large sphere sampled in equirectangular coordinates;
floors are infinite planes textured in world XY.  Both are pure functions
of position, so renders stay bit-deterministic with no image assets.
"""

from __future__ import annotations

import numpy as np

from .errors import SchemaViolation

PANORAMA_KINDS = ("indoor", "outdoor")
FLOOR_KINDS = ("plain", "wood", "grass")

_PROCEDURAL_PREFIX = "procedural:"


def panorama_kind(ref: str) -> str:
    if ref.startswith(_PROCEDURAL_PREFIX):
        kind = ref[len(_PROCEDURAL_PREFIX):]
        if kind in PANORAMA_KINDS:
            return kind
    raise SchemaViolation(
        f"unsupported panorama source {ref!r}; expected one of "
        + ", ".join(_PROCEDURAL_PREFIX + k for k in PANORAMA_KINDS),
        field="panorama",
    )


def floor_kind(ref: str | None) -> str:
    if ref is None:
        return "plain"
    if ref.startswith(_PROCEDURAL_PREFIX):
        kind = ref[len(_PROCEDURAL_PREFIX):]
        if kind in FLOOR_KINDS:
            return kind
    raise SchemaViolation(
        f"unsupported floor texture {ref!r}; expected one of "
        + ", ".join(_PROCEDURAL_PREFIX + k for k in FLOOR_KINDS),
        field="floor_texture",
    )


def _fract_noise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cheap deterministic value noise in [0, 1) from two coordinates."""
    return np.modf(np.sin(a * 12.9898 + b * 78.233) * 43758.5453123)[0] % 1.0


def sample_panorama(kind: str, dirs: np.ndarray, theta: float) -> np.ndarray:
    """Color for unit directions on the inside of the environment sphere.

    ``theta`` rotates the environment about Z.  u wraps azimuthally, v runs
    0 at the zenith to 1 at the nadir.
    """
    dirs = np.asarray(dirs, dtype=np.float64).reshape(-1, 3)
    u = (np.arctan2(dirs[:, 1], dirs[:, 0]) + theta) / (2.0 * np.pi) % 1.0
    v = np.arccos(np.clip(dirs[:, 2], -1.0, 1.0)) / np.pi
    out = np.empty((dirs.shape[0], 3), dtype=np.float64)

    if kind == "indoor":
        # warm wall gradient with soft panel banding and a darker base
        top = np.array([0.82, 0.78, 0.70])
        bottom = np.array([0.48, 0.43, 0.38])
        out[:] = top + (bottom - top) * v[:, None]
        band = 0.04 * np.sin(u * 2.0 * np.pi * 8.0)
        out += band[:, None]
        out[v > 0.80] *= 0.75
    elif kind == "outdoor":
        sky_top = np.array([0.30, 0.52, 0.88])
        sky_horizon = np.array([0.78, 0.87, 0.95])
        ground = np.array([0.42, 0.50, 0.34])
        t = np.clip(v / 0.5, 0.0, 1.0)
        out[:] = sky_top + (sky_horizon - sky_top) * t[:, None]
        clouds = 0.10 * np.clip(np.sin(u * 2.0 * np.pi * 3.0 + v * 9.0), 0.0, 1.0)
        out += (clouds * (v < 0.45))[:, None]
        below = v >= 0.5
        shade = 1.0 - 0.5 * np.clip((v[below] - 0.5) / 0.5, 0.0, 1.0)
        out[below] = ground * shade[:, None]
    else:
        raise SchemaViolation(f"unknown panorama kind {kind!r}", field="panorama")
    return np.clip(out, 0.0, 1.0)


def floor_colors(kind: str, xy: np.ndarray,
                 base_color: tuple[float, float, float]) -> np.ndarray:
    """Albedo for floor hit points, shape (N, 3); ``xy`` is (N, 2) world m."""
    xy = np.asarray(xy, dtype=np.float64).reshape(-1, 2)
    n = xy.shape[0]
    if kind == "plain":
        return np.tile(np.asarray(base_color, dtype=np.float64), (n, 1))
    if kind == "wood":
        plank = np.floor(xy[:, 1] / 0.35)
        tone = 0.80 + 0.25 * _fract_noise(plank, np.zeros_like(plank))
        grain = 0.05 * np.sin(xy[:, 0] * 22.0 + plank * 2.1)
        base = np.array([0.55, 0.39, 0.25])
        return np.clip(base[None, :] * (tone + grain)[:, None], 0.0, 1.0)
    if kind == "grass":
        base = np.array([0.31, 0.45, 0.23])
        tone = 0.85 + 0.30 * _fract_noise(np.floor(xy[:, 0] * 9.0),
                                          np.floor(xy[:, 1] * 9.0))
        return np.clip(base[None, :] * tone[:, None], 0.0, 1.0)
    raise SchemaViolation(f"unknown floor kind {kind!r}", field="floor_texture")
