"""Scene assembly and the scene.v1 interchange format.

A scene graph bundles the six renderable components: placed object assets,
floor plane, environment background, point light, camera, and the spatial
ground truth they realize.  Serialization embeds normalized meshes so a
scene file is self-contained; floats go through repr so round-trips are
byte-exact.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass

from .assets import AssetCatalog, AssetInstance
from .backgrounds import floor_kind, panorama_kind
from .camera import Camera
from .errors import MissingFile, SchemaViolation
from .layout import Layout
from .meshes import mesh_from_lists, mesh_to_lists
from .prompts import SpatialSpec, Triple
from .relations import kind_from_token
from .seeds import derive_seed

SCENE_SCHEMA = "scene.v1"

BACKGROUND_SPHERE_RADIUS = 50.0
LIGHT_INTENSITY = 1.0
_PLAIN_FLOOR_COLOR = (0.82, 0.82, 0.82)
_TAU = 6.283185307179586


@dataclass
class PlacedAsset:
    asset: AssetInstance
    position: tuple[float, float, float]
    yaw: float
    label: int
    bbox_min: tuple[float, float, float]
    bbox_max: tuple[float, float, float]


@dataclass
class Floor:
    z: float
    kind: str
    color: tuple[float, float, float]


@dataclass
class Background:
    name: str
    mode: str  # "color" or "panorama"
    color: tuple[float, float, float] | None
    kind: str | None
    theta: float
    sphere_radius: float = BACKGROUND_SPHERE_RADIUS


@dataclass
class Light:
    position: tuple[float, float, float]
    intensity: float = LIGHT_INTENSITY


@dataclass
class SceneGraph:
    placed: list[PlacedAsset]
    floor: Floor | None
    background: Background
    light: Light
    camera: Camera
    spec: SpatialSpec
    seed: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SceneGraph):
            return NotImplemented
        return scene_to_dict(self) == scene_to_dict(other)


def synthesize(layout: Layout, spec: SpatialSpec, catalog: AssetCatalog,
               background_name: str, seed: int) -> SceneGraph:
    """Assemble a renderable scene from a solved layout.

    Asset variants are drawn per object slot from seeds derived off the
    scene seed; the floor is dropped to the lowest object's bbox bottom;
    the environment gets a seeded rotation about Z.
    """
    record = catalog.background(background_name)

    placed: list[PlacedAsset] = []
    for i, placement in enumerate(layout.placements):
        asset = catalog.select_asset(placement.class_name,
                                     derive_seed("asset", seed, i))
        world = asset.mesh.transformed(placement.yaw, placement.position)
        lo, hi = world.bbox()
        placed.append(
            PlacedAsset(
                asset=asset,
                position=placement.position,
                yaw=placement.yaw,
                label=i + 1,
                bbox_min=(float(lo[0]), float(lo[1]), float(lo[2])),
                bbox_max=(float(hi[0]), float(hi[1]), float(hi[2])),
            )
        )

    floor = None
    if placed:
        floor = Floor(
            z=min(p.bbox_min[2] for p in placed),
            kind=floor_kind(record.floor_texture),
            color=_PLAIN_FLOOR_COLOR,
        )

    theta = random.Random(derive_seed("background", seed)).uniform(0.0, _TAU)
    if record.panorama is None:
        background = Background(
            name=record.name,
            mode="color",
            color=record.base_color if record.base_color is not None else (1.0, 1.0, 1.0),
            kind=None,
            theta=theta,
        )
    else:
        background = Background(
            name=record.name,
            mode="panorama",
            color=None,
            kind=panorama_kind(record.panorama),
            theta=theta,
        )

    return SceneGraph(
        placed=placed,
        floor=floor,
        background=background,
        light=Light(position=layout.light),
        camera=layout.camera,
        spec=spec,
        seed=seed,
    )


def _v3(t) -> list[float]:
    return [float(t[0]), float(t[1]), float(t[2])]


def scene_to_dict(scene: SceneGraph) -> dict:
    return {
        "schema": SCENE_SCHEMA,
        "seed": scene.seed,
        "spec": {
            "raw_text": scene.spec.raw_text,
            "triples": [[t.subject, t.kind.token(), t.obj] for t in scene.spec.triples],
            "substitutions": [[noun, cls] for noun, cls in scene.spec.substitutions_applied],
        },
        "camera": {
            "position": _v3(scene.camera.position),
            "look_at": _v3(scene.camera.look_at),
            "vfov_deg": float(scene.camera.vfov_deg),
        },
        "light": {
            "position": _v3(scene.light.position),
            "intensity": float(scene.light.intensity),
        },
        "background": {
            "name": scene.background.name,
            "mode": scene.background.mode,
            "color": None if scene.background.color is None else list(scene.background.color),
            "kind": scene.background.kind,
            "theta": float(scene.background.theta),
            "sphere_radius": float(scene.background.sphere_radius),
        },
        "floor": None
        if scene.floor is None
        else {
            "z": float(scene.floor.z),
            "kind": scene.floor.kind,
            "color": list(scene.floor.color),
        },
        "objects": [
            {
                "label": p.label,
                "class": p.asset.class_name,
                "position": _v3(p.position),
                "yaw": float(p.yaw),
                "base_color": list(p.asset.base_color),
                "scale_applied": float(p.asset.scale_applied),
                "bbox": {"min": _v3(p.bbox_min), "max": _v3(p.bbox_max)},
                "mesh": mesh_to_lists(p.asset.mesh),
            }
            for p in scene.placed
        ],
    }


def serialize_scene(scene: SceneGraph) -> str:
    return json.dumps(scene_to_dict(scene), indent=1) + "\n"


def scene_from_dict(data: dict) -> SceneGraph:
    if not isinstance(data, dict) or data.get("schema") != SCENE_SCHEMA:
        raise SchemaViolation(
            f"expected schema {SCENE_SCHEMA!r}, got {data.get('schema')!r}"
            if isinstance(data, dict)
            else "scene document must be an object",
            field="schema",
        )
    try:
        spec = SpatialSpec(
            triples=[
                Triple(subject=s, kind=kind_from_token(tok), obj=o)
                for s, tok, o in data["spec"]["triples"]
            ],
            raw_text=data["spec"]["raw_text"],
            substitutions_applied=[
                (noun, cls) for noun, cls in data["spec"]["substitutions"]
            ],
        )
        camera = Camera(
            position=tuple(data["camera"]["position"]),
            look_at=tuple(data["camera"]["look_at"]),
            vfov_deg=data["camera"]["vfov_deg"],
        )
        light = Light(
            position=tuple(data["light"]["position"]),
            intensity=data["light"]["intensity"],
        )
        bg = data["background"]
        background = Background(
            name=bg["name"],
            mode=bg["mode"],
            color=None if bg["color"] is None else tuple(bg["color"]),
            kind=bg["kind"],
            theta=bg["theta"],
            sphere_radius=bg["sphere_radius"],
        )
        floor = None
        if data["floor"] is not None:
            floor = Floor(
                z=data["floor"]["z"],
                kind=data["floor"]["kind"],
                color=tuple(data["floor"]["color"]),
            )
        placed = []
        for obj in data["objects"]:
            asset = AssetInstance(
                class_name=obj["class"],
                mesh=mesh_from_lists(obj["mesh"]),
                base_color=tuple(obj["base_color"]),
                scale_applied=obj["scale_applied"],
            )
            placed.append(
                PlacedAsset(
                    asset=asset,
                    position=tuple(obj["position"]),
                    yaw=obj["yaw"],
                    label=obj["label"],
                    bbox_min=tuple(obj["bbox"]["min"]),
                    bbox_max=tuple(obj["bbox"]["max"]),
                )
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"malformed scene document: {exc!r}", field=str(exc))
    return SceneGraph(
        placed=placed,
        floor=floor,
        background=background,
        light=light,
        camera=camera,
        spec=spec,
        seed=data.get("seed", 0),
    )


def parse_scene(text: str) -> SceneGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"scene file is not valid JSON: {exc}", field="<root>")
    return scene_from_dict(data)


def load_scene(path: str) -> SceneGraph:
    if not os.path.isfile(path):
        raise MissingFile(f"scene file not found: {path}", path=path)
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scene(fh.read())
