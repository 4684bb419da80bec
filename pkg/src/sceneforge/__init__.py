"""Text-to-scene compiler and spatial-fidelity evaluation toolkit.

Turns short spatial prompts ("a cat to the left of a dog") into deterministic
3D layouts, renders them with a self-contained software ray tracer, and scores
spatial faithfulness with question-answer and detection-based metrics.
"""

from .assets import AssetCatalog, AssetInstance, load_default_manifest, load_manifest
from .camera import Camera, camera_basis, project, ray_directions
from .config import Config
from .errors import SceneForgeError
from .guidance import bboxes_from_mask, detection_records, edge_map, export_scene
from .layout import JitterConfig, Layout, LayoutConfig, diversify, solve
from .prompts import SpatialSpec, Triple, parse_prompt
from .relations import (
    ABOVE,
    BEHIND,
    BELOW,
    IN_FRONT,
    LEFT,
    NEAR,
    RIGHT,
    RelationKind,
)
from .render import FrameSet, render
from .revqa import generate_questions, score_responses
from .scene import SceneGraph, load_scene, serialize_scene, synthesize
from .seeds import derive_seed
from .visor import aggregate, judge_2d, judge_depth, read_detections

__version__ = "0.1.0"

__all__ = [
    "ABOVE",
    "BEHIND",
    "BELOW",
    "IN_FRONT",
    "LEFT",
    "NEAR",
    "RIGHT",
    "AssetCatalog",
    "AssetInstance",
    "Camera",
    "Config",
    "FrameSet",
    "JitterConfig",
    "Layout",
    "LayoutConfig",
    "RelationKind",
    "SceneForgeError",
    "SceneGraph",
    "SpatialSpec",
    "Triple",
    "aggregate",
    "bboxes_from_mask",
    "camera_basis",
    "derive_seed",
    "detection_records",
    "diversify",
    "edge_map",
    "export_scene",
    "generate_questions",
    "judge_2d",
    "judge_depth",
    "load_default_manifest",
    "load_manifest",
    "load_scene",
    "parse_prompt",
    "project",
    "ray_directions",
    "read_detections",
    "render",
    "score_responses",
    "serialize_scene",
    "solve",
    "synthesize",
    "__version__",
]
