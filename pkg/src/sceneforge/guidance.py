"""Guidance artifacts: edge maps, ground-truth boxes, and scene exports.

Edge maps feed edge-conditioned image generation; box/centroid records are
the ground-truth analogue of detector output and share one line-delimited
schema with ingested detections; the build-script export replays a scene
in an external DCC tool's scripting console.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import BadThresholds, UnsupportedFormat
from .render import FrameSet
from .scene import SceneGraph, serialize_scene
from .visor import DETECTIONS_SCHEMA

_LUMA = np.array([0.299, 0.587, 0.114])


def edge_map(rgb: np.ndarray, low_threshold: float = 50.0,
             high_threshold: float = 150.0) -> np.ndarray:
    """Canny edges of an RGB image as a bool array.

    Gaussian blur (sigma 1.4), Sobel gradients, 4-direction non-maximum
    suppression, then hysteresis keeping weak edges 8-connected to strong
    ones.  Thresholds apply to the raw L2 Sobel magnitude of the 0-255
    grayscale, the scale on which the common 50/150 defaults live.
    """
    if not (0 <= low_threshold < high_threshold <= 255):
        raise BadThresholds(
            f"need 0 <= low < high <= 255, got low={low_threshold}, high={high_threshold}",
            low=low_threshold,
            high=high_threshold,
        )
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {rgb.shape}")
    gray = np.asarray(rgb, dtype=np.float64) @ _LUMA
    blurred = ndimage.gaussian_filter(gray, sigma=1.4, mode="nearest")
    gx = ndimage.sobel(blurred, axis=1, mode="nearest")
    gy = ndimage.sobel(blurred, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)

    theta = np.arctan2(gy, gx)
    sector = np.rint(theta / (np.pi / 4.0)).astype(np.int64) % 4
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    padded = np.pad(mag, 1, mode="constant")
    keep = np.zeros_like(mag, dtype=bool)
    h, w = mag.shape
    for s, (dr, dc) in offsets.items():
        ahead = padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
        behind = padded[1 - dr : 1 - dr + h, 1 - dc : 1 - dc + w]
        keep |= (sector == s) & (mag >= ahead) & (mag >= behind)
    keep &= mag > 0

    weak = keep & (mag >= low_threshold)
    strong = keep & (mag >= high_threshold)
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=np.int32))
    if count == 0:
        return np.zeros_like(weak)
    strong_labels = np.unique(labels[strong])
    strong_labels = strong_labels[strong_labels > 0]
    return weak & np.isin(labels, strong_labels)


@dataclass(frozen=True)
class BoxRecord:
    label: int
    bbox: tuple[int, int, int, int]  # x0, y0, x1, y1 inclusive
    centroid: tuple[float, float]    # (cx, cy) in pixel coordinates
    pixels: int


def bboxes_from_mask(id_mask: np.ndarray) -> dict[int, BoxRecord]:
    """Tight boxes, pixel centroids, and areas per nonzero mask label."""
    id_mask = np.asarray(id_mask)
    result: dict[int, BoxRecord] = {}
    for label in np.unique(id_mask):
        if label == 0:
            continue
        rows, cols = np.nonzero(id_mask == label)
        result[int(label)] = BoxRecord(
            label=int(label),
            bbox=(int(cols.min()), int(rows.min()), int(cols.max()), int(rows.max())),
            centroid=(float(cols.mean()), float(rows.mean())),
            pixels=int(rows.size),
        )
    return result


def detection_records(image_id: str, prompt_id: str, frames: FrameSet,
                      scene: SceneGraph, depth_map: str | None = None) -> list[dict]:
    """Ground-truth detection records for one rendered frame, schema-
    compatible with ingested external detector output."""
    class_by_label = {p.label: p.asset.class_name for p in scene.placed}
    boxes = bboxes_from_mask(frames.id_mask)
    if not boxes:
        return [{"image_id": image_id, "prompt_id": prompt_id, "empty": True,
                 "depth_map": depth_map}]
    records = []
    for label in sorted(boxes):
        box = boxes[label]
        records.append(
            {
                "image_id": image_id,
                "prompt_id": prompt_id,
                "label": box.label,
                "class": class_by_label.get(label, f"label_{label}"),
                "x0": box.bbox[0],
                "y0": box.bbox[1],
                "x1": box.bbox[2],
                "y1": box.bbox[3],
                "cx": box.centroid[0],
                "cy": box.centroid[1],
                "pixels": box.pixels,
                "confidence": 1.0,
                "depth_map": depth_map,
            }
        )
    return records


def write_detections(path: str, records: list[dict],
                     depth_convention: str = "metric") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"schema": DETECTIONS_SCHEMA,
                             "depth_convention": depth_convention}) + "\n")
        for record in records:
            fh.write(json.dumps(record) + "\n")


def _fmt_v(vec) -> str:
    return f"({float(vec[0])!r}, {float(vec[1])!r}, {float(vec[2])!r})"


def _build_script(scene: SceneGraph) -> str:
    lines = [
        "# Scene build script (build-script v1), deterministic output.",
        "# Paste into a Blender scripting console (or run with blender",
        "# --python).  Object meshes are emitted in world space.",
        "import bpy",
        "import mathutils",
        "",
        "bpy.ops.object.select_all(action='SELECT')",
        "bpy.ops.object.delete()",
        "",
    ]
    for placed in scene.placed:
        world = placed.asset.mesh.transformed(placed.yaw, placed.position)
        name = f"obj_{placed.label}_{placed.asset.class_name.replace(' ', '_')}"
        verts = ", ".join(_fmt_v(v) for v in world.vertices)
        faces = ", ".join(f"({f[0]}, {f[1]}, {f[2]})" for f in world.faces)
        r, g, b = placed.asset.base_color
        lines += [
            f"# object: {placed.asset.class_name} (label {placed.label})",
            f"_mesh = bpy.data.meshes.new({name!r})",
            f"_mesh.from_pydata([{verts}], [], [{faces}])",
            "_mesh.update()",
            f"_obj = bpy.data.objects.new({name!r}, _mesh)",
            "bpy.context.collection.objects.link(_obj)",
            f"_mat = bpy.data.materials.new({name!r})",
            f"_mat.diffuse_color = ({r!r}, {g!r}, {b!r}, 1.0)",
            "_obj.data.materials.append(_mat)",
            "",
        ]
    if scene.floor is not None:
        lines += [
            "# floor",
            "bpy.ops.mesh.primitive_plane_add(size=100.0, "
            f"location=(0.0, 0.0, {scene.floor.z!r}))",
            "",
        ]
    lines += [
        "# light",
        "bpy.ops.object.light_add(type='POINT', "
        f"location={_fmt_v(scene.light.position)})",
        f"bpy.context.object.data.energy = {1000.0 * scene.light.intensity!r}",
        "",
        "# camera",
        f"bpy.ops.object.camera_add(location={_fmt_v(scene.camera.position)})",
        "_cam = bpy.context.object",
        f"_aim = mathutils.Vector({_fmt_v(scene.camera.look_at)}) - _cam.location",
        "_cam.rotation_euler = _aim.to_track_quat('-Z', 'Y').to_euler()",
        "_cam.data.sensor_fit = 'VERTICAL'",
        f"_cam.data.angle = {scene.camera.vfov_deg!r} * 3.141592653589793 / 180.0",
        "bpy.context.scene.camera = _cam",
        "",
        f"# background: {scene.background.name} "
        f"(environment rotation {scene.background.theta!r} rad)",
    ]
    if scene.background.mode == "color":
        r, g, b = scene.background.color
        lines.append(
            "bpy.context.scene.world.color = "
            f"({r!r}, {g!r}, {b!r})"
        )
    else:
        lines.append(
            f"# procedural '{scene.background.kind}' environment; attach an"
        )
        lines.append("# equirectangular texture of your choice here.")
    lines.append("")
    return "\n".join(lines)


EXPORT_FORMATS = ("scene.v1", "build-script")


def export_scene(scene: SceneGraph, format: str) -> str:
    """Serialize a scene as scene.v1 JSON or a DCC build script."""
    if format == "scene.v1":
        return serialize_scene(scene)
    if format == "build-script":
        return _build_script(scene)
    raise UnsupportedFormat(
        f"unknown export format {format!r}; supported: {', '.join(EXPORT_FORMATS)}",
        format=format,
    )
