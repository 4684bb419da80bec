import json

import pytest

from sceneforge.assets import (
    class_color,
    load_manifest,
    placeholder_mesh,
)
from sceneforge.errors import (
    EmptyName,
    MissingFile,
    SchemaViolation,
    UnknownBackground,
    UnknownClass,
    UnknownMeshFormat,
    UnresolvableNoun,
)

TETRA = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 3\nf 1 2 4\nf 1 3 4\nf 2 3 4\n"


def manifest_dict(**overrides):
    data = {
        "schema": "assets.v1",
        "classes": [{"class": "cat", "coco": True}, {"class": "dog", "coco": True}],
        "substitutes": {"lion": "cat"},
        "backgrounds": [
            {"name": "White", "panorama": None, "floor_texture": None,
             "base_color": [1, 1, 1]},
        ],
    }
    data.update(overrides)
    return data


def write_manifest(tmp_path, data):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_class_color_deterministic_and_distinct():
    assert class_color("cat") == class_color("cat")
    assert class_color("cat") != class_color("dog")
    assert all(0.0 <= c <= 1.0 for c in class_color("cat"))


def test_placeholder_mesh_shape():
    mesh, color = placeholder_mesh("cat")
    assert mesh.vertices.shape == (12, 3)
    assert mesh.faces.shape == (20, 3)
    assert color == class_color("cat")
    # normalized: unit max extent, grounded, horizontally centered
    lo, hi = mesh.bbox()
    assert float(mesh.extents().max()) == pytest.approx(1.0)
    assert lo[2] == pytest.approx(0.0)
    assert (lo[0] + hi[0]) / 2 == pytest.approx(0.0)
    # distinct classes get distinct proportions
    other, _ = placeholder_mesh("dog")
    assert other != mesh


def test_placeholder_rejects_empty_name():
    with pytest.raises(EmptyName):
        placeholder_mesh("")


def test_load_manifest_with_mesh_files(tmp_path):
    (tmp_path / "cat.mesh").write_text(TETRA)
    data = manifest_dict()
    data["classes"][0]["meshes"] = ["cat.mesh"]
    cat = load_manifest(write_manifest(tmp_path, data))
    assert cat.class_names == ["cat", "dog"]
    record = cat.classes[0]
    assert record.variants[0].source == "cat.mesh"
    assert record.variants[0].scale_applied == pytest.approx(1.0)
    # class without mesh files falls back to a placeholder variant
    assert cat.classes[1].variants[0].source == "placeholder"


def test_load_manifest_missing_file(tmp_path):
    with pytest.raises(MissingFile):
        load_manifest(str(tmp_path / "absent.json"))
    data = manifest_dict()
    data["classes"][0]["meshes"] = ["nope.mesh"]
    with pytest.raises(MissingFile):
        load_manifest(write_manifest(tmp_path, data))


def test_load_manifest_bad_mesh(tmp_path):
    (tmp_path / "bad.mesh").write_text("not a mesh line")
    data = manifest_dict()
    data["classes"][0]["meshes"] = ["bad.mesh"]
    with pytest.raises(UnknownMeshFormat):
        load_manifest(write_manifest(tmp_path, data))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(schema="assets.v2"),
        lambda d: d.update(classes=[]),
        lambda d: d.update(classes=[{"coco": True}]),
        lambda d: d.update(classes=[{"class": "cat"}, {"class": "cat"}]),
        lambda d: d.update(substitutes={"lion": "griffin"}),
        lambda d: d.update(backgrounds=[{"panorama": None}]),
        lambda d: d.update(backgrounds=[{"name": "W", "base_color": [1, 1]}]),
    ],
)
def test_load_manifest_schema_violations(tmp_path, mutate):
    data = manifest_dict()
    mutate(data)
    with pytest.raises(SchemaViolation) as err:
        load_manifest(write_manifest(tmp_path, data))
    assert err.value.context.get("field")


def test_default_catalog_contents(catalog):
    assert len(catalog.class_names) == 101
    assert catalog.class_names == sorted(catalog.class_names)
    assert len(catalog.substitutes) == 80
    # every substitute target is a coco class
    coco = {r.name for r in catalog.classes if r.coco}
    assert len(coco) == 80
    assert all(target in coco for target in catalog.substitutes.values())
    assert {b.name for b in catalog.backgrounds} == {"White", "Indoor", "Outdoor"}


def test_resolve(catalog):
    assert catalog.resolve("cat") == "cat"
    sub = next(iter(catalog.substitutes))
    assert catalog.resolve(sub) == catalog.substitutes[sub]
    with pytest.raises(UnresolvableNoun) as err:
        catalog.resolve("gryphon")
    assert err.value.context["noun"] == "gryphon"


def test_select_asset_deterministic(catalog):
    a = catalog.select_asset("cat", 5)
    b = catalog.select_asset("cat", 5)
    assert a == b
    assert a.class_name == "cat"
    with pytest.raises(UnknownClass):
        catalog.select_asset("gryphon", 5)


def test_background_lookup_case_insensitive(catalog):
    assert catalog.background("white").name == "White"
    assert catalog.background("OUTDOOR").name == "Outdoor"
    with pytest.raises(UnknownBackground):
        catalog.background("Void")
