"""PNG encoding for the three frame layers.

Depth is exported as 16-bit grayscale in millimeters with a 20 m far
clip; environment misses and anything at or beyond the clip encode as 0,
which readers restore to +inf.  Edge maps are written 1-bit.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

FAR_CLIP_M = 20.0


def write_rgb(path: str, rgb: np.ndarray) -> None:
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), mode="RGB").save(
        path, format="PNG"
    )


def read_rgb(path: str) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def write_depth(path: str, depth: np.ndarray, far_clip: float = FAR_CLIP_M) -> None:
    depth = np.asarray(depth, dtype=np.float64)
    mm = np.rint(depth * 1000.0)
    mm[~np.isfinite(depth) | (depth >= far_clip)] = 0.0
    encoded = np.ascontiguousarray(np.clip(mm, 0.0, 65535.0).astype("<u2"))
    height, width = encoded.shape
    Image.frombytes("I;16", (width, height), encoded.tobytes()).save(
        path, format="PNG"
    )


def read_depth(path: str) -> np.ndarray:
    with Image.open(path) as img:
        mm = np.asarray(img, dtype=np.uint16).astype(np.float64)
    depth = mm / 1000.0
    depth[mm == 0] = np.inf
    return depth


def write_mask(path: str, mask: np.ndarray) -> None:
    Image.fromarray(np.ascontiguousarray(mask, dtype=np.uint8), mode="L").save(
        path, format="PNG"
    )


def read_mask(path: str) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img, dtype=np.uint8)


def write_binary(path: str, bits: np.ndarray) -> None:
    gray = np.where(np.asarray(bits, dtype=bool), 255, 0).astype(np.uint8)
    Image.fromarray(gray, mode="L").convert("1", dither=Image.Dither.NONE).save(
        path, format="PNG"
    )


def read_binary(path: str) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img, dtype=bool)
