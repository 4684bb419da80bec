import numpy as np
import pytest

from sceneforge.camera import Camera
from sceneforge.errors import DegenerateCamera
from sceneforge.layout import solve
from sceneforge.prompts import parse_prompt
from sceneforge.render import render
from sceneforge.scene import synthesize


def build(catalog, prompt="a cat to the left of a dog", seed=7, bg="White"):
    spec = parse_prompt(prompt, catalog)
    return synthesize(solve(spec, seed), spec, catalog, bg, seed)


def test_frames_shapes_and_dtypes(catalog):
    frames = render(build(catalog), 80, 64)
    assert frames.rgb.shape == (64, 80, 3)
    assert frames.rgb.dtype == np.uint8
    assert frames.depth.shape == (64, 80)
    assert frames.id_mask.shape == (64, 80)
    assert frames.id_mask.dtype == np.uint8


def test_both_objects_visible_with_coherent_depth(catalog):
    frames = render(build(catalog), 128, 128)
    labels = set(np.unique(frames.id_mask).tolist())
    assert labels == {0, 1, 2}
    # every object pixel carries a finite positive depth
    obj = frames.id_mask > 0
    assert np.all(np.isfinite(frames.depth[obj]))
    assert np.all(frames.depth[obj] > 0.0)
    # cat (label 1) lies left of dog (label 2) in image columns
    cat_cols = np.where(frames.id_mask == 1)[1]
    dog_cols = np.where(frames.id_mask == 2)[1]
    assert cat_cols.mean() < dog_cols.mean()


def test_depth_ordering_for_depth_relation(catalog):
    frames = render(build(catalog, "a cat in front of a dog"), 128, 128)
    d_cat = np.median(frames.depth[frames.id_mask == 1])
    d_dog = np.median(frames.depth[frames.id_mask == 2])
    assert d_cat < d_dog


def test_white_background_pixels(catalog):
    frames = render(build(catalog, bg="White"), 64, 64)
    # a sky-corner pixel misses floor and objects: pure background color
    assert frames.id_mask[0, 0] == 0
    assert np.isinf(frames.depth[0, 0])
    assert tuple(frames.rgb[0, 0]) == (255, 255, 255)


def test_panorama_background_deterministic(catalog):
    a = render(build(catalog, bg="Outdoor"), 64, 64)
    b = render(build(catalog, bg="Outdoor"), 64, 64)
    assert np.array_equal(a.rgb, b.rgb)
    # sky pixels are colored, not white
    assert tuple(a.rgb[0, 0]) != (255, 255, 255)


def test_shadows_toggle(catalog):
    scene = build(catalog)
    lit = render(scene, 64, 64, shadows=True)
    flat = render(scene, 64, 64, shadows=False)
    assert np.array_equal(lit.id_mask, flat.id_mask)
    assert np.array_equal(lit.depth, flat.depth)
    assert not np.array_equal(lit.rgb, flat.rgb)  # some pixels darkened


def test_render_determinism(catalog):
    scene = build(catalog, bg="Indoor", seed=31)
    a = render(scene, 96, 96)
    b = render(scene, 96, 96)
    assert np.array_equal(a.rgb, b.rgb)
    assert np.array_equal(a.depth, b.depth)
    assert np.array_equal(a.id_mask, b.id_mask)


def test_tiny_resolution_rejected(catalog):
    scene = build(catalog)
    with pytest.raises(ValueError):
        render(scene, 8, 64)
    with pytest.raises(ValueError):
        render(scene, 64, 15)


def test_degenerate_camera_rejected(catalog):
    scene = build(catalog)
    scene.camera = Camera(position=(5.0, 0.0, 1.5), look_at=(5.0, 0.0, 1.5))
    with pytest.raises(DegenerateCamera):
        render(scene, 64, 64)


def test_floor_reaches_horizon(catalog):
    frames = render(build(catalog), 64, 64)
    # bottom rows are floor: background label but finite depth
    bottom = frames.depth[-1]
    assert np.all(np.isfinite(bottom))
    assert np.all(frames.id_mask[-1] == 0)
