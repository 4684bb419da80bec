"""Triangle-mesh container, ASCII mesh I/O, and normalization helpers.

Meshes are indexed triangle lists: an (N, 3) float64 vertex array in meters
and an (M, 3) integer face array holding 0-based vertex indices.  The text
format uses 1-based indices (`v x y z` / `f i j k` lines) so files stay
hand-editable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnknownMeshFormat


@dataclass
class Mesh:
    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self) -> None:
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices) and np.array_equal(
            self.faces, other.faces
        )

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def extents(self) -> np.ndarray:
        lo, hi = self.bbox()
        return hi - lo

    def transformed(self, yaw: float, translation) -> "Mesh":
        """Yaw about the +z axis through the local origin, then translate.

        Normalized meshes keep their resting pose: the horizontal bbox
        center moves to the target xy and the bbox bottom lands at the
        target z.
        """
        c, s = math.cos(yaw), math.sin(yaw)
        rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        verts = self.vertices @ rot.T + np.asarray(translation, dtype=np.float64)
        return Mesh(verts, self.faces.copy())


def parse_mesh_text(text: str, source: str = "<string>") -> Mesh:
    """Parse the ASCII indexed-triangle format.

    Recognized lines: `v x y z`, `f i j k` (1-based indices), blank lines,
    and `#` comments.  Anything else is a format error.
    """
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "v" and len(parts) == 4:
            try:
                xyz = [float(p) for p in parts[1:]]
            except ValueError:
                raise UnknownMeshFormat(
                    f"{source}:{lineno}: bad vertex coordinates", line=lineno
                )
            if not all(math.isfinite(c) for c in xyz):
                raise UnknownMeshFormat(
                    f"{source}:{lineno}: non-finite vertex coordinate", line=lineno
                )
            verts.append(xyz)
        elif parts[0] == "f" and len(parts) == 4:
            try:
                ijk = [int(p) for p in parts[1:]]
            except ValueError:
                raise UnknownMeshFormat(
                    f"{source}:{lineno}: bad face indices", line=lineno
                )
            if any(i < 1 or i > len(verts) for i in ijk):
                raise UnknownMeshFormat(
                    f"{source}:{lineno}: face index out of range", line=lineno
                )
            faces.append([i - 1 for i in ijk])
        else:
            raise UnknownMeshFormat(
                f"{source}:{lineno}: unrecognized line {line!r}", line=lineno
            )
    if not verts or not faces:
        raise UnknownMeshFormat(f"{source}: mesh needs at least one vertex and one face")
    return Mesh(np.array(verts), np.array(faces))


def mesh_to_text(mesh: Mesh) -> str:
    lines = [f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}" for v in mesh.vertices]
    lines += [f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}" for f in mesh.faces]
    return "\n".join(lines) + "\n"


def load_mesh_file(path: str) -> Mesh:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UnknownMeshFormat(f"cannot read mesh file {path}: {exc}") from exc
    return parse_mesh_text(text, source=path)


def normalize_mesh(mesh: Mesh) -> tuple[Mesh, float]:
    """Uniformly rescale so the longest bbox edge is exactly 1 m, then move
    the bbox so its horizontal center sits at (0, 0) and its bottom at z=0.

    Returns the normalized mesh and the scale factor that was applied.
    """
    extent = float(mesh.extents().max())
    if extent <= 0.0:
        raise UnknownMeshFormat("degenerate mesh: zero bounding-box extent")
    scale = 1.0 / extent
    verts = mesh.vertices * scale
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    shift = np.array([(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, lo[2]])
    return Mesh(verts - shift, mesh.faces.copy()), scale


def mesh_to_lists(mesh: Mesh) -> dict:
    return {
        "vertices": [[float(c) for c in v] for v in mesh.vertices],
        "faces": [[int(i) for i in f] for f in mesh.faces],
    }


def mesh_from_lists(data: dict) -> Mesh:
    return Mesh(np.array(data["vertices"], dtype=np.float64),
                np.array(data["faces"], dtype=np.int64))
