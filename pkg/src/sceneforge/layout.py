"""Deterministic layout: spatial triples to world coordinates, plus jitter.

World frame: X depth, Y horizontal, Z up.  Per-axis placement rules:

    Horizontal  X=Z=0, objects split along Y, d in [1, 1.5]
    Vertical    X=Y=0, objects split along Z, d in [0.75, 1]
    Near        Z=0,  objects split along Y (seeded side order), d in [0.75, 1]
    Depth       Z=0, Y=0, mirrored along X,  d in [1, 1.5]

The default split is symmetric about the origin (each object gets d/2), so
solving "A left of B" and "B right of A" under one seed yields the same
unordered placement set.  The camera sits at x=5 looking at the origin,
elevated to z=2.5 when any triple is a depth relation so near-collinear
depth placements stay distinguishable; otherwise z=1.5.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .camera import BEHIND, Camera, camera_depth, project
from .prompts import SpatialSpec
from .relations import Axis, Polarity
from .seeds import derive_seed, unit_floats

# axis index into (x, y, z) position tuples
_AXIS_INDEX = {Axis.HORIZONTAL: 1, Axis.VERTICAL: 2, Axis.NEAR: 1, Axis.DEPTH: 0}

# Half the unit cube: no normalized asset extends further than this from
# its bbox center, so "top" bounds derived from it are conservative.
_HALF_EXTENT = 0.5


@dataclass(frozen=True)
class LayoutRule:
    axis_index: int
    d_range: tuple[float, float]
    mirror: bool = False


RULES: dict[Axis, LayoutRule] = {
    Axis.HORIZONTAL: LayoutRule(axis_index=1, d_range=(1.0, 1.5)),
    Axis.VERTICAL: LayoutRule(axis_index=2, d_range=(0.75, 1.0)),
    Axis.NEAR: LayoutRule(axis_index=1, d_range=(0.75, 1.0)),
    Axis.DEPTH: LayoutRule(axis_index=0, d_range=(1.0, 1.5), mirror=True),
}


@dataclass(slots=True)
class Placement:
    class_name: str
    position: tuple[float, float, float]
    yaw: float = 0.0


@dataclass(slots=True)
class TripleGeom:
    """Solved geometry of one triple: placement indices plus the drawn
    distance and direction sign, kept so the diversifier can re-split."""

    subject_index: int
    object_index: int
    axis_index: int
    sign: float
    d: float


@dataclass(slots=True)
class Layout:
    placements: list[Placement]
    camera: Camera
    light: tuple[float, float, float]
    seed: int
    spec: SpatialSpec
    geoms: list[TripleGeom] = field(default_factory=list)


@dataclass
class LayoutConfig:
    vfov_deg: float = 50.0
    camera_distance: float = 5.0
    camera_height: float = 1.5
    camera_height_depth: float = 2.5
    light_xy_range: float = 2.0
    light_z_above: tuple[float, float] = (2.0, 3.0)
    # pins every triple's distance instead of drawing from the rule range
    fixed_distance: float | None = None


@dataclass
class JitterConfig:
    camera_pos: float = 0.25
    look_at: float = 0.10
    yaw_deg: float = 15.0
    split_delta: float = 0.15
    max_attempts: int = 16

    @classmethod
    def zero(cls) -> "JitterConfig":
        return cls(camera_pos=0.0, look_at=0.0, yaw_deg=0.0, split_delta=0.0)


def _triple_sign(polarity: Polarity, near_sign: float) -> float:
    if polarity is Polarity.POSITIVE:
        return 1.0
    if polarity is Polarity.NEGATIVE:
        return -1.0
    return near_sign


def _pair_offsets(sign: float, d: float, u: float) -> tuple[float, float]:
    """Axis offsets for (subject, object): the subject takes fraction u of
    the gap on its side of the origin.  u=0.5 is the symmetric default."""
    return sign * d * u, -sign * d * (1.0 - u)


def _shifted(position: tuple[float, float, float], axis_index: int,
             value: float) -> tuple[float, float, float]:
    parts = list(position)
    parts[axis_index] = parts[axis_index] + value
    return (parts[0], parts[1], parts[2])


def solve(spec: SpatialSpec, seed: int, config: LayoutConfig | None = None) -> Layout:
    """Deterministically place objects, camera, and light for a spec.

    Draw order under the seeded RNG is fixed (per-triple distance, then a
    side sign for near triples, then the light position), so equal seeds
    give bit-equal layouts and mirrored specs give equal placement sets.
    """
    cfg = config or LayoutConfig()
    draw = iter(unit_floats(2 * len(spec.triples) + 3, "solve", seed))

    draws: list[tuple[LayoutRule, float, float]] = []
    for triple in spec.triples:
        rule = RULES[triple.kind.axis]
        if cfg.fixed_distance is not None:
            d = cfg.fixed_distance
        else:
            lo, hi = rule.d_range
            d = lo + (hi - lo) * next(draw)
        near_sign = 1.0
        if triple.kind.axis is Axis.NEAR:
            near_sign = 1.0 if next(draw) < 0.5 else -1.0
        draws.append((rule, d, near_sign))

    first = spec.triples[0]
    rule0, d0, near0 = draws[0]
    sign0 = _triple_sign(first.kind.polarity, near0)
    sub_off, obj_off = _pair_offsets(sign0, d0, 0.5)
    origin = (0.0, 0.0, 0.0)
    positions = [
        _shifted(origin, rule0.axis_index, sub_off),
        _shifted(origin, rule0.axis_index, obj_off),
    ]
    class_names = [first.subject, first.obj]
    geoms = [TripleGeom(0, 1, rule0.axis_index, sign0, d0)]

    if len(spec.triples) == 2:
        second = spec.triples[1]
        rule1, d1, near1 = draws[1]
        sign1 = _triple_sign(second.kind.polarity, near1)
        # second triple's subject is the already-placed middle object;
        # the new object sits opposite the relation direction from it
        positions.append(_shifted(positions[1], rule1.axis_index, -sign1 * d1))
        class_names.append(second.obj)
        geoms.append(TripleGeom(1, 2, rule1.axis_index, sign1, d1))

        cx = (positions[0][0] + positions[1][0] + positions[2][0]) / 3.0
        cy = (positions[0][1] + positions[1][1] + positions[2][1]) / 3.0
        cz = (positions[0][2] + positions[1][2] + positions[2][2]) / 3.0
        positions = [(p[0] - cx, p[1] - cy, p[2] - cz) for p in positions]
        peak = max(abs(c) for p in positions for c in p)
        if peak > 1.0:
            scale = 1.0 / peak
            positions = [(p[0] * scale, p[1] * scale, p[2] * scale) for p in positions]
            for geom in geoms:
                geom.d *= scale

    any_depth = any(t.kind.axis is Axis.DEPTH for t in spec.triples)
    cam_z = cfg.camera_height_depth if any_depth else cfg.camera_height
    camera = Camera(
        position=(cfg.camera_distance, 0.0, cam_z),
        look_at=(0.0, 0.0, 0.0),
        vfov_deg=cfg.vfov_deg,
    )

    top = max(p[2] for p in positions) + _HALF_EXTENT
    r = cfg.light_xy_range
    z_lo, z_hi = cfg.light_z_above
    light = (
        -r + 2.0 * r * next(draw),
        -r + 2.0 * r * next(draw),
        top + z_lo + (z_hi - z_lo) * next(draw),
    )

    placements = [Placement(class_name=c, position=p) for c, p in zip(class_names, positions)]
    return Layout(placements=placements, camera=camera, light=light, seed=seed,
                  spec=spec, geoms=geoms)


def _relation_holds(layout: Layout) -> bool:
    """Check every triple against the current camera via projection (screen
    ordering for horizontal/vertical, camera-space depth for depth)."""
    width = height = 1000
    screen = []
    for placement in layout.placements:
        s = project(placement.position, layout.camera, width, height)
        if s is BEHIND:
            return False
        screen.append(s)
    for triple, geom in zip(layout.spec.triples, layout.geoms):
        a, b = geom.subject_index, geom.object_index
        axis = triple.kind.axis
        polarity = triple.kind.polarity
        if axis is Axis.HORIZONTAL:
            delta = screen[b][0] - screen[a][0]
            ok = delta > 0 if polarity is Polarity.NEGATIVE else delta < 0
        elif axis is Axis.VERTICAL:
            delta = screen[b][1] - screen[a][1]
            ok = delta > 0 if polarity is Polarity.POSITIVE else delta < 0
        elif axis is Axis.DEPTH:
            delta = camera_depth(layout.placements[b].position, layout.camera) - camera_depth(
                layout.placements[a].position, layout.camera
            )
            ok = delta > 0 if polarity is Polarity.POSITIVE else delta < 0
        else:
            ok = True
        if not ok:
            return False
    return True


def diversify(layout: Layout, seed: int,
              jitter_config: JitterConfig | None = None) -> Layout:
    """Seeded pose jitter that provably preserves the prompted relations.

    Each attempt re-splits two-object gaps asymmetrically, perturbs the
    camera pose, and spins objects about Z, then re-checks every relation
    through the camera.  After max_attempts failed draws the unjittered
    layout is returned, so the operation always succeeds.
    """
    cfg = jitter_config or JitterConfig()
    rng = random.Random(derive_seed("diversify", seed))
    two_objects = len(layout.placements) == 2

    for _ in range(cfg.max_attempts):
        if two_objects:
            geom = layout.geoms[0]
            u = rng.uniform(0.5 - cfg.split_delta, 0.5 + cfg.split_delta)
            sub_off, obj_off = _pair_offsets(geom.sign, geom.d, u)
            base = (0.0, 0.0, 0.0)
            positions = [
                _shifted(base, geom.axis_index, sub_off),
                _shifted(base, geom.axis_index, obj_off),
            ]
        else:
            positions = [p.position for p in layout.placements]

        cam = layout.camera
        j = cfg.camera_pos
        cam_pos = (
            cam.position[0] + rng.uniform(-j, j),
            cam.position[1] + rng.uniform(-j, j),
            cam.position[2] + rng.uniform(-j, j),
        )
        j = cfg.look_at
        cam_look = (
            cam.look_at[0] + rng.uniform(-j, j),
            cam.look_at[1] + rng.uniform(-j, j),
            cam.look_at[2] + rng.uniform(-j, j),
        )
        yaw_limit = cfg.yaw_deg * 3.141592653589793 / 180.0
        yaws = [rng.uniform(-yaw_limit, yaw_limit) for _ in layout.placements]

        candidate = Layout(
            placements=[
                Placement(class_name=p.class_name, position=pos, yaw=yaw)
                for p, pos, yaw in zip(layout.placements, positions, yaws)
            ],
            camera=Camera(position=cam_pos, look_at=cam_look, vfov_deg=cam.vfov_deg),
            light=layout.light,
            seed=layout.seed,
            spec=layout.spec,
            geoms=[
                TripleGeom(g.subject_index, g.object_index, g.axis_index, g.sign, g.d)
                for g in layout.geoms
            ],
        )
        if _relation_holds(candidate):
            return candidate
    return layout
