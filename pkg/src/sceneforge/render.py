"""Deterministic ray-cast renderer: RGB, metric depth, and object-ID mask.

One primary ray per pixel center plus one shadow ray per lit hit.  All
math is vectorized float64 with a fixed chunk size and fixed object order,
so outputs are bit-identical across runs and worker counts.  Depth stores
the Euclidean ray-hit distance (directions are unit length, so distance
equals the ray parameter t); environment misses are +inf.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backgrounds import floor_colors, sample_panorama
from .camera import camera_basis, ray_directions
from .errors import DegenerateCamera
from .scene import SceneGraph

_CHUNK = 65536
# cap on rays x triangles per Moller-Trumbore batch, bounds peak memory
_MT_BUDGET = 4_000_000
_EPS = 1e-9
_T_MIN = 1e-6
_SHADOW_OFFSET = 1e-5

AMBIENT = 0.25


@dataclass
class FrameSet:
    rgb: np.ndarray      # (H, W, 3) uint8
    depth: np.ndarray    # (H, W) float64 ray distance, +inf at environment pixels
    id_mask: np.ndarray  # (H, W) uint8, 0 = background/floor


class _TriPack:
    """Per-object world-space triangles with precomputed edge products."""

    def __init__(self, label: int, mesh_world, base_color) -> None:
        self.label = label
        verts = mesh_world.vertices
        faces = mesh_world.faces
        self.v0 = verts[faces[:, 0]]
        e1 = verts[faces[:, 1]] - self.v0
        e2 = verts[faces[:, 2]] - self.v0
        self.e1 = e1
        self.e2 = e2
        normals = np.cross(e1, e2)
        lengths = np.linalg.norm(normals, axis=1, keepdims=True)
        lengths[lengths == 0.0] = 1.0
        self.normals = normals / lengths
        self.lo = verts.min(axis=0) - _EPS
        self.hi = verts.max(axis=0) + _EPS
        self.color = np.asarray(base_color, dtype=np.float64)


def _build_packs(scene: SceneGraph) -> list[_TriPack]:
    packs = []
    for placed in scene.placed:
        world = placed.asset.mesh.transformed(placed.yaw, placed.position)
        packs.append(_TriPack(placed.label, world, placed.asset.base_color))
    return packs


def _aabb_mask(origin: np.ndarray, dirs: np.ndarray, lo: np.ndarray,
               hi: np.ndarray, t_best: np.ndarray) -> np.ndarray:
    """Slab test; origin may be (3,) shared or (N, 3) per ray."""
    d_safe = np.where(np.abs(dirs) < 1e-12, 1e-12, dirs)
    t1 = (lo - origin) / d_safe
    t2 = (hi - origin) / d_safe
    t_near = np.minimum(t1, t2).max(axis=-1)
    t_far = np.maximum(t1, t2).min(axis=-1)
    return (t_far >= np.maximum(t_near, 0.0)) & (t_near < t_best)


def _primary_object_hits(pack: _TriPack, origin: np.ndarray, dirs: np.ndarray,
                         t_best: np.ndarray):
    """Nearest triangle hit per ray for rays sharing one origin.

    Returns (hit_mask, t, face_index) over the supplied rays.
    """
    n_rays = dirs.shape[0]
    n_tris = pack.v0.shape[0]
    tvec = origin - pack.v0                     # (M, 3), shared origin
    qvec = np.cross(tvec, pack.e1)              # (M, 3)
    e2q = np.einsum("mj,mj->m", pack.e2, qvec)  # (M,)

    t_out = np.full(n_rays, np.inf)
    face_out = np.zeros(n_rays, dtype=np.int64)
    batch = max(1, _MT_BUDGET // max(n_tris, 1))
    for start in range(0, n_rays, batch):
        d = dirs[start : start + batch]
        pvec = np.cross(d[:, None, :], pack.e2[None, :, :])
        det = np.einsum("mj,rmj->rm", pack.e1, pvec)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            u = np.einsum("mj,rmj->rm", tvec, pvec) * inv
            v = np.einsum("rj,mj->rm", d, qvec) * inv
            t = e2q[None, :] * inv
        valid = (
            (np.abs(det) > _EPS)
            & (u >= -_EPS)
            & (v >= -_EPS)
            & (u + v <= 1.0 + _EPS)
            & (t > _T_MIN)
        )
        t = np.where(valid, t, np.inf)
        idx = np.argmin(t, axis=1)
        rows = np.arange(t.shape[0])
        t_out[start : start + batch] = t[rows, idx]
        face_out[start : start + batch] = idx
    hit = t_out < t_best
    return hit, t_out, face_out


def _any_occlusion(packs: list[_TriPack], origins: np.ndarray, dirs: np.ndarray,
                   t_max: np.ndarray) -> np.ndarray:
    """True where the segment origin + t*dir, t in (0, t_max), hits any
    object triangle.  Used for shadow rays; origins vary per ray."""
    n_rays = origins.shape[0]
    occluded = np.zeros(n_rays, dtype=bool)
    for pack in packs:
        open_idx = np.flatnonzero(~occluded)
        if open_idx.size == 0:
            break
        o = origins[open_idx]
        d = dirs[open_idx]
        tm = t_max[open_idx]
        candidates = _aabb_mask(o, d, pack.lo, pack.hi, tm)
        cand_idx = open_idx[candidates]
        if cand_idx.size == 0:
            continue
        o = origins[cand_idx]
        d = dirs[cand_idx]
        tm = t_max[cand_idx]
        n_tris = pack.v0.shape[0]
        batch = max(1, _MT_BUDGET // max(n_tris, 1))
        hit_any = np.zeros(cand_idx.size, dtype=bool)
        for start in range(0, cand_idx.size, batch):
            ob = o[start : start + batch]
            db = d[start : start + batch]
            tb = tm[start : start + batch]
            tvec = ob[:, None, :] - pack.v0[None, :, :]
            pvec = np.cross(db[:, None, :], pack.e2[None, :, :])
            det = np.einsum("mj,rmj->rm", pack.e1, pvec)
            with np.errstate(divide="ignore", invalid="ignore"):
                inv = 1.0 / det
                u = np.einsum("rmj,rmj->rm", tvec, pvec) * inv
                qvec = np.cross(tvec, pack.e1[None, :, :])
                v = np.einsum("rj,rmj->rm", db, qvec) * inv
                t = np.einsum("mj,rmj->rm", pack.e2, qvec) * inv
            valid = (
                (np.abs(det) > _EPS)
                & (u >= -_EPS)
                & (v >= -_EPS)
                & (u + v <= 1.0 + _EPS)
                & (t > _T_MIN)
                & (t < tb[:, None])
            )
            hit_any[start : start + batch] = valid.any(axis=1)
        occluded[cand_idx] = hit_any
    return occluded


def _sphere_points(origin: np.ndarray, dirs: np.ndarray, radius: float) -> np.ndarray:
    """Unit directions (from the world origin) of the points where rays
    leave through the environment sphere.  The camera sits inside the
    sphere, so the forward root always exists."""
    od = dirs @ origin
    disc = np.maximum(od * od - (origin @ origin - radius * radius), 0.0)
    t = -od + np.sqrt(disc)
    pts = origin + t[:, None] * dirs
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def render(scene: SceneGraph, width: int, height: int,
           shadows: bool = True) -> FrameSet:
    """Render a scene to RGB + depth + ID mask at the given resolution."""
    if width < 16 or height < 16:
        raise ValueError(f"resolution must be at least 16x16, got {width}x{height}")
    origin_t = np.asarray(scene.camera.position, dtype=np.float64)
    if float(np.linalg.norm(origin_t)) < 1e-9:
        raise DegenerateCamera("camera is at the world origin")
    camera_basis(scene.camera)  # validates FOV and pose

    packs = _build_packs(scene)
    dirs_all = ray_directions(scene.camera, width, height)
    n_rays = dirs_all.shape[0]

    depth_flat = np.full(n_rays, np.inf)
    label_flat = np.zeros(n_rays, dtype=np.uint8)
    rgb_flat = np.zeros((n_rays, 3))

    light_pos = np.asarray(scene.light.position, dtype=np.float64)
    bg = scene.background

    for start in range(0, n_rays, _CHUNK):
        dirs = dirs_all[start : start + _CHUNK]
        count = dirs.shape[0]
        t_best = np.full(count, np.inf)
        labels = np.zeros(count, dtype=np.uint8)
        normals = np.zeros((count, 3))
        albedo = np.zeros((count, 3))

        for pack in packs:
            keep = _aabb_mask(origin_t, dirs, pack.lo, pack.hi, t_best)
            idx = np.flatnonzero(keep)
            if idx.size == 0:
                continue
            hit, t_obj, face = _primary_object_hits(
                pack, origin_t, dirs[idx], t_best[idx]
            )
            win = idx[hit]
            if win.size == 0:
                continue
            t_best[win] = t_obj[hit]
            labels[win] = pack.label
            normals[win] = pack.normals[face[hit]]
            albedo[win] = pack.color

        if scene.floor is not None:
            dz = dirs[:, 2]
            dz_safe = np.where(np.abs(dz) < 1e-12, 1e-12, dz)
            t_floor = (scene.floor.z - origin_t[2]) / dz_safe
            floor_hit = (np.abs(dz) > 1e-12) & (t_floor > _T_MIN) & (t_floor < t_best)
            fi = np.flatnonzero(floor_hit)
            if fi.size:
                t_best[fi] = t_floor[fi]
                labels[fi] = 0
                normals[fi] = (0.0, 0.0, 1.0)
                pts_xy = origin_t[:2] + t_floor[fi, None] * dirs[fi, :2]
                albedo[fi] = floor_colors(scene.floor.kind, pts_xy, scene.floor.color)

        hit_mask = np.isfinite(t_best)
        colors = np.zeros((count, 3))

        miss = np.flatnonzero(~hit_mask)
        if miss.size:
            if bg.mode == "color":
                colors[miss] = np.asarray(bg.color, dtype=np.float64)
            else:
                env = _sphere_points(origin_t, dirs[miss], bg.sphere_radius)
                colors[miss] = sample_panorama(bg.kind, env, bg.theta)

        lit = np.flatnonzero(hit_mask)
        if lit.size:
            d = dirs[lit]
            t = t_best[lit]
            pts = origin_t + t[:, None] * d
            n = normals[lit]
            # flip face normals toward the viewer
            facing = np.einsum("rj,rj->r", n, d)
            n = np.where(facing[:, None] > 0.0, -n, n)
            to_light = light_pos - pts
            dist = np.linalg.norm(to_light, axis=1)
            dist_safe = np.where(dist < 1e-12, 1e-12, dist)
            ldir = to_light / dist_safe[:, None]
            lambert = np.clip(np.einsum("rj,rj->r", n, ldir), 0.0, None)
            visibility = np.ones(lit.size)
            if shadows and packs:
                shadow_origins = pts + n * _SHADOW_OFFSET
                occ = _any_occlusion(packs, shadow_origins, ldir, dist - _SHADOW_OFFSET)
                visibility[occ] = 0.0
            intensity = AMBIENT + (1.0 - AMBIENT) * lambert * visibility * scene.light.intensity
            colors[lit] = albedo[lit] * intensity[:, None]

        sl = slice(start, start + count)
        depth_flat[sl] = t_best
        label_flat[sl] = labels
        rgb_flat[sl] = colors

    rgb = np.clip(np.rint(rgb_flat * 255.0), 0.0, 255.0).astype(np.uint8)
    return FrameSet(
        rgb=rgb.reshape(height, width, 3),
        depth=depth_flat.reshape(height, width),
        id_mask=label_flat.reshape(height, width),
    )
