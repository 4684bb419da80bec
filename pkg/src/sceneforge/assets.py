"""Object-class catalog: manifest loading, asset selection, and substitution.

The default manifest ships 101 classes backed by procedural placeholder
geometry.  User manifests may point classes at external mesh files in the
ASCII indexed-triangle format; those are loaded eagerly and rescaled to the
1 m cube at load time so later stages never touch the filesystem.
"""

from __future__ import annotations

import colorsys
import json
import os
import random
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import (
    EmptyName,
    MissingFile,
    SchemaViolation,
    UnknownBackground,
    UnknownClass,
    UnresolvableNoun,
)
from .meshes import Mesh, load_mesh_file, normalize_mesh
from .seeds import derive_seed, stable_hash64

MANIFEST_SCHEMA = "assets.v1"

# Fixed saturation/value; per-class hue comes from the name hash.
_COLOR_S = 0.62
_COLOR_V = 0.88


def class_color(class_name: str) -> tuple[float, float, float]:
    """Deterministic per-class RGB color in [0, 1]."""
    digest = stable_hash64(class_name).to_bytes(8, "big")
    hue = int.from_bytes(digest[:3], "big") / float(0xFFFFFF)
    return colorsys.hsv_to_rgb(hue, _COLOR_S, _COLOR_V)


def placeholder_mesh(class_name: str) -> tuple[Mesh, tuple[float, float, float]]:
    """Procedural stand-in asset: a box whose front face is beveled into a
    smaller label plate.  Proportions vary per class via the name hash, so
    different classes are visually distinguishable even in silhouette.
    """
    if not class_name:
        raise EmptyName("class name must be non-empty")
    digest = stable_hash64(class_name).to_bytes(8, "big")
    sx = 0.55 + 0.45 * digest[3] / 255.0
    sy = 0.55 + 0.45 * digest[4] / 255.0
    sz = 0.55 + 0.45 * digest[5] / 255.0
    inset = 0.55 + 0.30 * digest[6] / 255.0
    bevel = 0.06 + 0.06 * digest[7] / 255.0
    hx, hy, hz = sx / 2.0, sy / 2.0, sz / 2.0
    bx = hx - bevel
    ty, tz = inset * hy, inset * hz
    verts = np.array(
        [
            [-hx, -hy, -hz], [-hx, hy, -hz], [-hx, hy, hz], [-hx, -hy, hz],
            [bx, -hy, -hz], [bx, hy, -hz], [bx, hy, hz], [bx, -hy, hz],
            [hx, -ty, -tz], [hx, ty, -tz], [hx, ty, tz], [hx, -ty, tz],
        ]
    )
    faces = np.array(
        [
            [0, 3, 2], [0, 2, 1],          # back
            [0, 1, 5], [0, 5, 4],          # bottom
            [3, 7, 6], [3, 6, 2],          # top
            [0, 4, 7], [0, 7, 3],          # left
            [1, 2, 6], [1, 6, 5],          # right
            [4, 5, 9], [4, 9, 8],          # bevel bottom
            [5, 6, 10], [5, 10, 9],        # bevel right
            [6, 7, 11], [6, 11, 10],       # bevel top
            [7, 4, 8], [7, 8, 11],         # bevel left
            [8, 9, 10], [8, 10, 11],       # label face
        ]
    )
    mesh, _ = normalize_mesh(Mesh(verts, faces))
    return mesh, class_color(class_name)


@dataclass
class Variant:
    mesh: Mesh
    scale_applied: float
    source: str


@dataclass
class ClassRecord:
    name: str
    coco: bool
    variants: list[Variant] = field(default_factory=list)


@dataclass
class BackgroundRecord:
    name: str
    panorama: str | None
    floor_texture: str | None
    base_color: tuple[float, float, float] | None


@dataclass
class AssetInstance:
    class_name: str
    mesh: Mesh
    base_color: tuple[float, float, float]
    scale_applied: float

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AssetInstance):
            return NotImplemented
        return (
            self.class_name == other.class_name
            and self.base_color == other.base_color
            and self.scale_applied == other.scale_applied
            and self.mesh == other.mesh
        )


class AssetCatalog:
    """Immutable after load; safe for concurrent reads."""

    def __init__(
        self,
        classes: list[ClassRecord],
        substitutes: dict[str, str],
        backgrounds: list[BackgroundRecord],
    ):
        self.classes = sorted(classes, key=lambda r: r.name)
        self.substitutes = dict(substitutes)
        self.backgrounds = list(backgrounds)
        self._by_name = {r.name: r for r in self.classes}
        self._bg_by_name = {b.name.lower(): b for b in self.backgrounds}

    @property
    def class_names(self) -> list[str]:
        return [r.name for r in self.classes]

    def has_class(self, name: str) -> bool:
        return name in self._by_name

    def resolve(self, noun: str) -> str:
        """Map a noun to a catalog class: identity for in-catalog classes,
        the substitute table for known out-of-vocabulary nouns."""
        if noun in self._by_name:
            return noun
        if noun in self.substitutes:
            return self.substitutes[noun]
        raise UnresolvableNoun(noun)

    def select_asset(self, class_name: str, rng_seed: int) -> AssetInstance:
        record = self._by_name.get(class_name)
        if record is None:
            raise UnknownClass(f"unknown class {class_name!r}", class_name=class_name)
        rng = random.Random(derive_seed("select_asset", class_name, rng_seed))
        variant = record.variants[rng.randrange(len(record.variants))]
        return AssetInstance(
            class_name=class_name,
            mesh=variant.mesh,
            base_color=class_color(class_name),
            scale_applied=variant.scale_applied,
        )

    def background(self, name: str) -> BackgroundRecord:
        record = self._bg_by_name.get(name.lower())
        if record is None:
            raise UnknownBackground(
                f"unknown background {name!r}; available: "
                + ", ".join(sorted(b.name for b in self.backgrounds)),
                name=name,
            )
        return record


def _require(condition: bool, message: str, **context) -> None:
    if not condition:
        raise SchemaViolation(message, **context)


def load_manifest(path: str) -> AssetCatalog:
    if not os.path.isfile(path):
        raise MissingFile(f"manifest not found: {path}", path=path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"manifest is not valid JSON: {exc}", field="<root>")
    return _catalog_from_data(data, base_dir=os.path.dirname(os.path.abspath(path)))


def load_default_manifest() -> AssetCatalog:
    with resources.files("sceneforge.data").joinpath("default_manifest.json").open(
        "r", encoding="utf-8"
    ) as fh:
        data = json.load(fh)
    return _catalog_from_data(data, base_dir=None)


def _catalog_from_data(data: dict, base_dir: str | None) -> AssetCatalog:
    _require(isinstance(data, dict), "manifest root must be an object", field="<root>")
    _require(
        data.get("schema") == MANIFEST_SCHEMA,
        f"manifest schema must be {MANIFEST_SCHEMA!r}",
        field="schema",
    )
    raw_classes = data.get("classes")
    _require(isinstance(raw_classes, list) and raw_classes,
             "classes must be a non-empty array", field="classes")

    classes: list[ClassRecord] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw_classes):
        where = f"classes[{i}]"
        _require(isinstance(entry, dict), f"{where} must be an object", field=where)
        name = entry.get("class")
        _require(isinstance(name, str) and name.strip(),
                 f"{where}.class must be a non-empty string", field=f"{where}.class")
        name = name.strip()
        _require(name not in seen, f"duplicate class {name!r}", field=f"{where}.class")
        seen.add(name)
        coco = entry.get("coco", False)
        _require(isinstance(coco, bool), f"{where}.coco must be a bool",
                 field=f"{where}.coco")
        mesh_paths = entry.get("meshes", [])
        _require(isinstance(mesh_paths, list),
                 f"{where}.meshes must be an array", field=f"{where}.meshes")
        variants: list[Variant] = []
        for mesh_path in mesh_paths:
            _require(isinstance(mesh_path, str),
                     f"{where}.meshes entries must be paths", field=f"{where}.meshes")
            full = mesh_path if base_dir is None else os.path.join(base_dir, mesh_path)
            if not os.path.isfile(full):
                raise MissingFile(f"mesh file not found: {full}", path=full)
            mesh, scale = normalize_mesh(load_mesh_file(full))
            variants.append(Variant(mesh=mesh, scale_applied=scale, source=mesh_path))
        if not variants:
            mesh, _ = placeholder_mesh(name)
            variants.append(Variant(mesh=mesh, scale_applied=1.0, source="placeholder"))
        classes.append(ClassRecord(name=name, coco=coco, variants=variants))

    class_names = {r.name for r in classes}
    raw_subs = data.get("substitutes", {})
    _require(isinstance(raw_subs, dict), "substitutes must be an object",
             field="substitutes")
    for noun, target in raw_subs.items():
        _require(isinstance(noun, str) and noun.strip(),
                 "substitute nouns must be non-empty strings", field="substitutes")
        _require(
            isinstance(target, str) and target in class_names,
            f"substitute {noun!r} maps to unknown class {target!r}",
            field=f"substitutes.{noun}",
        )

    raw_bgs = data.get("backgrounds", [])
    _require(isinstance(raw_bgs, list), "backgrounds must be an array",
             field="backgrounds")
    backgrounds: list[BackgroundRecord] = []
    for i, entry in enumerate(raw_bgs):
        where = f"backgrounds[{i}]"
        _require(isinstance(entry, dict), f"{where} must be an object", field=where)
        name = entry.get("name")
        _require(isinstance(name, str) and name.strip(),
                 f"{where}.name must be a non-empty string", field=f"{where}.name")
        panorama = entry.get("panorama")
        _require(panorama is None or isinstance(panorama, str),
                 f"{where}.panorama must be a string or null", field=f"{where}.panorama")
        floor_texture = entry.get("floor_texture")
        _require(
            floor_texture is None or isinstance(floor_texture, str),
            f"{where}.floor_texture must be a string or null",
            field=f"{where}.floor_texture",
        )
        base_color = entry.get("base_color")
        if base_color is not None:
            _require(
                isinstance(base_color, list)
                and len(base_color) == 3
                and all(isinstance(c, (int, float)) for c in base_color),
                f"{where}.base_color must be an [r, g, b] array",
                field=f"{where}.base_color",
            )
            base_color = tuple(float(c) for c in base_color)
        backgrounds.append(
            BackgroundRecord(
                name=name.strip(),
                panorama=panorama,
                floor_texture=floor_texture,
                base_color=base_color,
            )
        )

    return AssetCatalog(classes=classes, substitutes=dict(raw_subs),
                        backgrounds=backgrounds)
