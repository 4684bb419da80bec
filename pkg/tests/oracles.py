"""Slow reference implementations the test suite checks the package against.

Everything here is written independently of the library code paths it
verifies: ray casting solves the triangle system with a dense linear
solve per triangle instead of vectorized Moller-Trumbore, the camera
basis is rebuilt from scratch, and the question oracle evaluates over
plain token tuples instead of the AST node classes' own visitor.
"""

import math

import numpy as np


def _unit(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


def pixel_ray(camera, col, row, width, height):
    """Origin and unit direction through pixel center (col, row)."""
    origin = np.asarray(camera.position, dtype=np.float64)
    forward = _unit(np.asarray(camera.look_at, dtype=np.float64) - origin)
    right = _unit(np.cross(forward, np.array([0.0, 0.0, 1.0])))
    up = np.cross(right, forward)
    focal = (height / 2.0) / math.tan(math.radians(camera.vfov_deg) / 2.0)
    x = (col + 0.5 - width / 2.0) / focal
    y = (height / 2.0 - (row + 0.5)) / focal
    return origin, _unit(forward + x * right + y * up)


def raycast_depth(scene, col, row, width, height):
    """Closest hit distance for one pixel: triangle or floor, inf on miss.

    Each triangle is intersected by solving the 3x3 system
    [d, A-B, A-C] [t, u, v]^T = A - origin with a dense solver.
    """
    origin, direction = pixel_ray(scene.camera, col, row, width, height)
    best = math.inf
    for placed in scene.placed:
        world = placed.asset.mesh.transformed(placed.yaw, placed.position)
        verts = np.asarray(world.vertices, dtype=np.float64)
        for face in world.faces:
            a, b, c = verts[face[0]], verts[face[1]], verts[face[2]]
            m = np.column_stack([direction, a - b, a - c])
            if abs(np.linalg.det(m)) < 1e-14:
                continue
            t, u, v = np.linalg.solve(m, a - origin)
            if t > 1e-9 and u >= -1e-12 and v >= -1e-12 and u + v <= 1.0 + 1e-12:
                best = min(best, float(t))
    if scene.floor is not None and direction[2] < -1e-12:
        t = (scene.floor.z - origin[2]) / direction[2]
        if 0.0 < t < best:
            best = float(t)
    return best


def brute_answer(ast, present, relations):
    """Propositional truth over plain sets: present names and
    (subject, relation-token, object) tuples."""
    kind = type(ast).__name__
    if kind == "Present":
        return ast.name in present
    if kind == "Rel":
        return (ast.subject, ast.kind.token(), ast.obj) in relations
    if kind == "Not":
        return not brute_answer(ast.arg, present, relations)
    if kind == "And":
        return brute_answer(ast.left, present, relations) and brute_answer(
            ast.right, present, relations
        )
    if kind == "Or":
        return brute_answer(ast.left, present, relations) or brute_answer(
            ast.right, present, relations
        )
    raise AssertionError(f"unexpected node {ast!r}")
