"""Spatial-fidelity metrics over ingested detection and depth files.

Judging follows the centroid convention: a horizontal or vertical relation
is correct when the detected centroids are ordered accordingly on screen,
and a depth relation when the depth map values at the two centroids are
ordered per the stated convention (metric: smaller is closer; disparity:
larger is closer).  Aggregation reproduces the benchmark column
arithmetic: OA, unconditional and conditional accuracy, and the
fraction-of-prompts-with-at-least-n-correct-images columns.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CentroidOutOfBounds,
    IncompleteGroup,
    MissingFile,
    SchemaViolation,
    WrongAxis,
)
from .prompts import Triple
from .relations import Axis, Polarity

DETECTIONS_SCHEMA = "detections.v1"
DEPTH_CONVENTIONS = ("metric", "disparity")


@dataclass
class Detection:
    class_name: str
    confidence: float
    bbox: tuple[float, float, float, float]
    centroid: tuple[float, float]


@dataclass
class DetectionRecord:
    image_id: str
    prompt_id: str
    objects: list[Detection] = field(default_factory=list)
    depth_map: str | None = None


@dataclass
class Judgment:
    prompt_id: str
    image_id: str
    both_present: bool
    correct: bool
    relation: str = ""
    classes: tuple[str, ...] = ()


def _best_pair(record: DetectionRecord, class_a: str,
               class_b: str) -> tuple[Detection | None, Detection | None]:
    """Highest-confidence detection per class; for a self-relation the two
    most confident instances, best one taken as the subject."""
    if class_a == class_b:
        pool = sorted(
            (d for d in record.objects if d.class_name == class_a),
            key=lambda d: -d.confidence,
        )
        if len(pool) >= 2:
            return pool[0], pool[1]
        return (pool[0] if pool else None), None
    best: dict[str, Detection] = {}
    for det in record.objects:
        if det.class_name in (class_a, class_b):
            kept = best.get(det.class_name)
            if kept is None or det.confidence > kept.confidence:
                best[det.class_name] = det
    return best.get(class_a), best.get(class_b)


def judge_2d(record: DetectionRecord, triple: Triple) -> Judgment:
    """Centroid-ordering judgment for horizontal and vertical relations."""
    axis = triple.kind.axis
    if axis not in (Axis.HORIZONTAL, Axis.VERTICAL):
        raise WrongAxis(
            f"judge_2d handles horizontal/vertical relations, got {triple.kind.token()}",
            relation=triple.kind.token(),
        )
    det_a, det_b = _best_pair(record, triple.subject, triple.obj)
    both = det_a is not None and det_b is not None
    correct = False
    if both:
        if axis is Axis.HORIZONTAL:
            delta = det_b.centroid[0] - det_a.centroid[0]
            # left of: subject centroid strictly at smaller x
            correct = delta > 0 if triple.kind.polarity is Polarity.NEGATIVE else delta < 0
        else:
            delta = det_b.centroid[1] - det_a.centroid[1]
            # above: subject centroid strictly at smaller y (y grows down)
            correct = delta > 0 if triple.kind.polarity is Polarity.POSITIVE else delta < 0
    return Judgment(
        prompt_id=record.prompt_id,
        image_id=record.image_id,
        both_present=both,
        correct=correct,
        relation=triple.kind.token(),
        classes=(triple.subject, triple.obj),
    )


def _depth_at(depth_map: np.ndarray, centroid: tuple[float, float],
              image_id: str) -> float:
    height, width = depth_map.shape
    col = int(round(centroid[0]))
    row = int(round(centroid[1]))
    if not (0 <= row < height and 0 <= col < width):
        raise CentroidOutOfBounds(
            f"centroid ({centroid[0]}, {centroid[1]}) outside {width}x{height} "
            f"depth map of {image_id}",
            image_id=image_id,
        )
    return float(depth_map[row, col])


def judge_depth(record: DetectionRecord, depth_map: np.ndarray, triple: Triple,
                convention: str = "metric") -> Judgment:
    """Depth-map judgment for in-front/behind relations."""
    if triple.kind.axis is not Axis.DEPTH:
        raise WrongAxis(
            f"judge_depth handles depth relations, got {triple.kind.token()}",
            relation=triple.kind.token(),
        )
    if convention not in DEPTH_CONVENTIONS:
        raise SchemaViolation(
            f"depth convention must be one of {DEPTH_CONVENTIONS}, got {convention!r}",
            field="depth_convention",
        )
    depth_map = np.asarray(depth_map)
    det_a, det_b = _best_pair(record, triple.subject, triple.obj)
    both = det_a is not None and det_b is not None
    correct = False
    if both:
        d_a = _depth_at(depth_map, det_a.centroid, record.image_id)
        d_b = _depth_at(depth_map, det_b.centroid, record.image_id)
        closer = d_a < d_b if convention == "metric" else d_a > d_b
        in_front = triple.kind.polarity is Polarity.POSITIVE
        correct = closer if in_front else (
            d_a > d_b if convention == "metric" else d_a < d_b
        )
    return Judgment(
        prompt_id=record.prompt_id,
        image_id=record.image_id,
        both_present=both,
        correct=correct,
        relation=triple.kind.token(),
        classes=(triple.subject, triple.obj),
    )


@dataclass
class VisorReport:
    oa: float
    uncond: float
    cond: float
    visor: tuple[float, ...]
    n_prompts: int
    n_images: int
    per_relation: dict[str, dict]
    per_object: dict[str, float]

    def to_text(self) -> str:
        heads = ["OA", "uncond", "cond"] + [f"VISOR{i+1}" for i in range(len(self.visor))]
        rows = [("all", [self.oa, self.uncond, self.cond, *self.visor])]
        for token in sorted(self.per_relation):
            sub = self.per_relation[token]
            rows.append((token, [sub["oa"], sub["uncond"], sub["cond"], *sub["visor"]]))
        width = max(8, max(len(r[0]) for r in rows) + 2)
        lines = [f"{'':<{width}}" + "".join(f"{h:>9}" for h in heads)]
        for name, values in rows:
            lines.append(
                f"{name:<{width}}" + "".join(f"{100.0 * v:>9.2f}" for v in values)
            )
        lines.append(f"({self.n_prompts} prompts, {self.n_images} images; "
                     f"values in %)")
        if self.per_object:
            lines.append("per-object success rate:")
            for cls in sorted(self.per_object):
                lines.append(f"  {cls:<20} {100.0 * self.per_object[cls]:>7.2f}")
        return "\n".join(lines) + "\n"

    def to_records(self) -> list[dict]:
        records = [
            {
                "split": "all",
                "oa": self.oa,
                "uncond": self.uncond,
                "cond": self.cond,
                "visor": list(self.visor),
                "n_prompts": self.n_prompts,
                "n_images": self.n_images,
            }
        ]
        for token in sorted(self.per_relation):
            records.append({"split": token, **self.per_relation[token]})
        for cls in sorted(self.per_object):
            records.append({"split": f"object:{cls}", "rate": self.per_object[cls]})
        return records


def _metrics(groups: dict[str, list[Judgment]], images_per_prompt: int) -> dict:
    n_prompts = len(groups)
    n_images = sum(len(g) for g in groups.values())
    both = sum(1 for g in groups.values() for j in g if j.both_present)
    correct_total = 0
    at_least = [0] * images_per_prompt
    for group in groups.values():
        c = sum(1 for j in group if j.correct)
        correct_total += c
        for n in range(1, c + 1):
            at_least[n - 1] += 1
    oa = both / n_images if n_images else 0.0
    uncond = correct_total / n_images if n_images else 0.0
    cond = uncond / oa if oa > 0 else 0.0
    visor = tuple(k / n_prompts if n_prompts else 0.0 for k in at_least)
    return {
        "oa": oa,
        "uncond": uncond,
        "cond": cond,
        "visor": visor,
        "n_prompts": n_prompts,
        "n_images": n_images,
    }


def aggregate(judgments: list[Judgment], images_per_prompt: int = 4) -> VisorReport:
    """Collapse per-image judgments into the benchmark metric columns.

    Every prompt must contribute exactly images_per_prompt judgments.
    """
    groups: dict[str, list[Judgment]] = {}
    for j in judgments:
        groups.setdefault(j.prompt_id, []).append(j)
    for prompt_id, group in groups.items():
        if len(group) != images_per_prompt:
            raise IncompleteGroup(
                f"prompt {prompt_id!r} has {len(group)} judgments, "
                f"expected {images_per_prompt}",
                prompt_id=prompt_id,
                count=len(group),
            )

    overall = _metrics(groups, images_per_prompt)

    per_relation: dict[str, dict] = {}
    tokens = sorted({j.relation for j in judgments if j.relation})
    for token in tokens:
        sub = {
            pid: [j for j in group if j.relation == token]
            for pid, group in groups.items()
        }
        sub = {pid: g for pid, g in sub.items() if g}
        if sub:
            per_relation[token] = _metrics(sub, images_per_prompt)

    return VisorReport(
        oa=overall["oa"],
        uncond=overall["uncond"],
        cond=overall["cond"],
        visor=overall["visor"],
        n_prompts=overall["n_prompts"],
        n_images=overall["n_images"],
        per_relation=per_relation,
        per_object=per_object_success(judgments),
    )


def per_object_success(judgments: list[Judgment]) -> dict[str, float]:
    """Correct fraction per participating class; absent classes omitted."""
    totals: dict[str, int] = {}
    wins: dict[str, int] = {}
    for j in judgments:
        for cls in set(j.classes):
            totals[cls] = totals.get(cls, 0) + 1
            if j.correct:
                wins[cls] = wins.get(cls, 0) + 1
    return {cls: wins.get(cls, 0) / totals[cls] for cls in totals}


# -- detections file ingestion ----------------------------------------------

_REQUIRED_FIELDS = ("image_id", "prompt_id", "class",
                    "x0", "y0", "x1", "y1", "cx", "cy")


def read_detections(path: str) -> tuple[dict[str, DetectionRecord], str]:
    """Parse a line-delimited detections file.

    Returns records keyed by image id plus the file's depth convention.
    The first line must be the schema header; every following line is one
    detection.  Centroids must sit inside their boxes.
    """
    if not os.path.isfile(path):
        raise MissingFile(f"detections file not found: {path}", path=path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    if not lines:
        raise SchemaViolation("detections file is empty", field="<header>")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"bad header line: {exc}", field="<header>")
    if not isinstance(header, dict) or header.get("schema") != DETECTIONS_SCHEMA:
        raise SchemaViolation(
            f"expected header schema {DETECTIONS_SCHEMA!r}", field="schema"
        )
    convention = header.get("depth_convention", "metric")
    if convention not in DEPTH_CONVENTIONS:
        raise SchemaViolation(
            f"depth convention must be one of {DEPTH_CONVENTIONS}, got {convention!r}",
            field="depth_convention",
        )

    records: dict[str, DetectionRecord] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"line {lineno}: not valid JSON: {exc}",
                                  field=f"line {lineno}")
        if data.get("empty"):
            # marker for an image with zero detections, so the image still
            # contributes a (false, false) judgment to its prompt group
            for key in ("image_id", "prompt_id"):
                if key not in data:
                    raise SchemaViolation(
                        f"line {lineno}: empty marker missing {key}",
                        field=f"line {lineno}",
                    )
            records.setdefault(
                data["image_id"],
                DetectionRecord(
                    image_id=data["image_id"],
                    prompt_id=data["prompt_id"],
                    depth_map=data.get("depth_map"),
                ),
            )
            continue
        missing = [k for k in _REQUIRED_FIELDS if k not in data]
        if missing:
            raise SchemaViolation(
                f"line {lineno}: missing fields {', '.join(missing)}",
                field=f"line {lineno}",
            )
        bbox = (float(data["x0"]), float(data["y0"]),
                float(data["x1"]), float(data["y1"]))
        centroid = (float(data["cx"]), float(data["cy"]))
        if not (bbox[0] <= centroid[0] <= bbox[2]
                and bbox[1] <= centroid[1] <= bbox[3]):
            raise SchemaViolation(
                f"line {lineno}: centroid {centroid} outside bbox {bbox}",
                field=f"line {lineno}",
            )
        record = records.get(data["image_id"])
        if record is None:
            record = records[data["image_id"]] = DetectionRecord(
                image_id=data["image_id"],
                prompt_id=data["prompt_id"],
                depth_map=data.get("depth_map"),
            )
        record.objects.append(
            Detection(
                class_name=data["class"],
                confidence=float(data.get("confidence", 1.0)),
                bbox=bbox,
                centroid=centroid,
            )
        )
    return records, convention
