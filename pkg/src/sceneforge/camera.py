"""Pinhole camera: basis construction, projection, and ray generation.

World frame: X is depth (toward the default camera), Y is horizontal,
Z is up.  The camera looks along ``look_at - position`` with world-up +Z;
camera right = forward x up, so +Y is screen-right for the default camera
at (5, 0, z).  Screen coordinates are continuous with the pixel-center
convention: pixel (row j, col i) is sampled at (i + 0.5, j + 0.5).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCamera

_UP = np.array([0.0, 0.0, 1.0])


class _Behind:
    __slots__ = ()

    def __repr__(self) -> str:
        return "BEHIND"


BEHIND = _Behind()


@dataclass
class Camera:
    position: tuple[float, float, float]
    look_at: tuple[float, float, float]
    vfov_deg: float = 50.0


def camera_basis(camera: Camera) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (origin, forward, right, up) as float64 vectors.

    Raises DegenerateCamera when the pose defines no frame: zero FOV,
    coincident position/look-at, or a view direction parallel to world-up.
    """
    if not (0.0 < camera.vfov_deg < 180.0):
        raise DegenerateCamera(
            f"vertical FOV must be in (0, 180) deg, got {camera.vfov_deg}",
            vfov_deg=camera.vfov_deg,
        )
    origin = np.asarray(camera.position, dtype=np.float64)
    target = np.asarray(camera.look_at, dtype=np.float64)
    forward = target - origin
    norm = np.linalg.norm(forward)
    if norm < 1e-9:
        raise DegenerateCamera("camera position coincides with look-at point")
    forward = forward / norm
    right = np.cross(forward, _UP)
    rnorm = np.linalg.norm(right)
    if rnorm < 1e-9:
        raise DegenerateCamera("view direction parallel to world up")
    right = right / rnorm
    up = np.cross(right, forward)
    return origin, forward, right, up


def project(world_point, camera: Camera, width: int, height: int):
    """Perspective-project a world point to continuous screen coordinates.

    Returns (screen_x, screen_y) or the BEHIND sentinel for points with
    non-positive camera-space depth.
    """
    origin, forward, right, up = camera_basis(camera)
    rel = np.asarray(world_point, dtype=np.float64) - origin
    z_cam = float(rel @ forward)
    if z_cam <= 0.0:
        return BEHIND
    x_cam = float(rel @ right)
    y_cam = float(rel @ up)
    focal = (height / 2.0) / math.tan(math.radians(camera.vfov_deg) / 2.0)
    sx = width / 2.0 + focal * x_cam / z_cam
    sy = height / 2.0 - focal * y_cam / z_cam
    return (sx, sy)


def camera_depth(world_point, camera: Camera) -> float:
    """Distance along the camera forward axis (planar depth, not ray length)."""
    origin, forward, _, _ = camera_basis(camera)
    rel = np.asarray(world_point, dtype=np.float64) - origin
    return float(rel @ forward)


def ray_directions(camera: Camera, width: int, height: int) -> np.ndarray:
    """Unit ray directions for every pixel center, shape (height*width, 3).

    Row-major order; the inverse of :func:`project` up to the perspective
    divide, so project(origin + t * dir(i, j)) returns (i + 0.5, j + 0.5).
    """
    _, forward, right, up = camera_basis(camera)
    focal = (height / 2.0) / math.tan(math.radians(camera.vfov_deg) / 2.0)
    cols = (np.arange(width, dtype=np.float64) + 0.5 - width / 2.0) / focal
    rows = (height / 2.0 - (np.arange(height, dtype=np.float64) + 0.5)) / focal
    xg, yg = np.meshgrid(cols, rows)
    dirs = (
        forward[None, None, :]
        + xg[:, :, None] * right[None, None, :]
        + yg[:, :, None] * up[None, None, :]
    ).reshape(-1, 3)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs
