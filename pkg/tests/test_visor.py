import json

import numpy as np
import pytest

from sceneforge.errors import (
    CentroidOutOfBounds,
    IncompleteGroup,
    MissingFile,
    SchemaViolation,
    WrongAxis,
)
from sceneforge.prompts import Triple
from sceneforge.relations import ABOVE, BEHIND, BELOW, IN_FRONT, LEFT, NEAR, RIGHT
from sceneforge.visor import (
    Detection,
    DetectionRecord,
    Judgment,
    aggregate,
    judge_2d,
    judge_depth,
    read_detections,
)


def det(cls, cx, cy, confidence=1.0):
    return Detection(class_name=cls, confidence=confidence,
                     bbox=(cx - 5, cy - 5, cx + 5, cy + 5), centroid=(cx, cy))


def record(*objects):
    return DetectionRecord(image_id="img", prompt_id="p", objects=list(objects))


def test_judge_2d_horizontal():
    rec = record(det("cat", 20, 50), det("dog", 80, 50))
    assert judge_2d(rec, Triple("cat", LEFT, "dog")).correct
    assert not judge_2d(rec, Triple("cat", RIGHT, "dog")).correct
    assert judge_2d(rec, Triple("dog", RIGHT, "cat")).correct


def test_judge_2d_vertical_screen_y_grows_down():
    rec = record(det("cat", 50, 20), det("dog", 50, 80))
    assert judge_2d(rec, Triple("cat", ABOVE, "dog")).correct
    assert not judge_2d(rec, Triple("cat", BELOW, "dog")).correct
    assert judge_2d(rec, Triple("dog", BELOW, "cat")).correct


def test_judge_2d_ties_are_incorrect():
    rec = record(det("cat", 50, 50), det("dog", 50, 50))
    assert not judge_2d(rec, Triple("cat", LEFT, "dog")).correct


def test_judge_2d_missing_object():
    rec = record(det("cat", 20, 50))
    j = judge_2d(rec, Triple("cat", LEFT, "dog"))
    assert not j.both_present and not j.correct
    assert j.relation == "left"
    assert j.classes == ("cat", "dog")


def test_judge_2d_picks_highest_confidence():
    rec = record(det("cat", 20, 50, 0.4), det("cat", 90, 50, 0.9),
                 det("dog", 60, 50))
    # the confident cat sits right of the dog
    assert not judge_2d(rec, Triple("cat", LEFT, "dog")).correct


def test_judge_2d_self_relation_uses_top_two():
    rec = record(det("cat", 20, 50, 0.9), det("cat", 80, 50, 0.5))
    assert judge_2d(rec, Triple("cat", LEFT, "cat")).correct
    solo = record(det("cat", 20, 50))
    assert not judge_2d(solo, Triple("cat", LEFT, "cat")).both_present


def test_judge_2d_wrong_axis():
    rec = record(det("cat", 20, 50), det("dog", 80, 50))
    for kind in (NEAR, IN_FRONT, BEHIND):
        with pytest.raises(WrongAxis):
            judge_2d(rec, Triple("cat", kind, "dog"))


def depth_map():
    d = np.full((100, 100), 10.0)
    d[:, :50] = 4.0  # left half is closer
    return d


def test_judge_depth_metric():
    rec = record(det("cat", 20, 50), det("dog", 80, 50))
    d = depth_map()
    assert judge_depth(rec, d, Triple("cat", IN_FRONT, "dog")).correct
    assert not judge_depth(rec, d, Triple("cat", BEHIND, "dog")).correct
    assert judge_depth(rec, d, Triple("dog", BEHIND, "cat")).correct


def test_judge_depth_disparity_flips():
    rec = record(det("cat", 20, 50), det("dog", 80, 50))
    d = depth_map()  # under disparity, larger means closer
    assert not judge_depth(rec, d, Triple("cat", IN_FRONT, "dog"),
                           convention="disparity").correct
    assert judge_depth(rec, d, Triple("cat", BEHIND, "dog"),
                       convention="disparity").correct


def test_judge_depth_validation():
    rec = record(det("cat", 20, 50), det("dog", 80, 50))
    with pytest.raises(WrongAxis):
        judge_depth(rec, depth_map(), Triple("cat", LEFT, "dog"))
    with pytest.raises(SchemaViolation):
        judge_depth(rec, depth_map(), Triple("cat", IN_FRONT, "dog"),
                    convention="sideways")
    off = record(det("cat", 20, 50), det("dog", 150, 50))
    with pytest.raises(CentroidOutOfBounds):
        judge_depth(off, depth_map(), Triple("cat", IN_FRONT, "dog"))


def judgments_for(prompt_id, flags, relation="left"):
    return [
        Judgment(prompt_id=prompt_id, image_id=f"{prompt_id}_{k}",
                 both_present=present, correct=correct,
                 relation=relation, classes=("cat", "dog"))
        for k, (present, correct) in enumerate(flags)
    ]


def test_aggregate_all():
    judgments = judgments_for("p0", [(True, True)] * 4)
    judgments += judgments_for("p1", [(True, True), (True, True),
                                      (True, False), (False, False)], "above")
    report = aggregate(judgments, images_per_prompt=4)
    assert report.n_prompts == 2
    assert report.n_images == 8
    assert report.oa == pytest.approx(7 / 8)
    assert report.uncond == pytest.approx(6 / 8)
    assert report.cond == pytest.approx((6 / 8) / (7 / 8))
    assert report.visor == pytest.approx((1.0, 1.0, 0.5, 0.5))
    assert set(report.per_relation) == {"left", "above"}
    assert report.per_relation["left"]["uncond"] == pytest.approx(1.0)
    assert report.per_object["cat"] == pytest.approx(6 / 8)
    text = report.to_text()
    assert "VISOR4" in text and "all" in text


def test_aggregate_incomplete_group():
    judgments = judgments_for("p0", [(True, True)] * 3)
    with pytest.raises(IncompleteGroup):
        aggregate(judgments, images_per_prompt=4)


def write_lines(tmp_path, lines):
    path = tmp_path / "det.jsonl"
    path.write_text("\n".join(json.dumps(l) for l in lines) + "\n")
    return str(path)


HEADER = {"schema": "detections.v1", "depth_convention": "metric"}
ROW = {"image_id": "i0", "prompt_id": "p0", "class": "cat",
       "x0": 0, "y0": 0, "x1": 10, "y1": 10, "cx": 5.0, "cy": 5.0}


def test_read_detections_ok(tmp_path):
    path = write_lines(tmp_path, [HEADER, ROW, {**ROW, "class": "dog"}])
    records, convention = read_detections(path)
    assert convention == "metric"
    assert len(records["i0"].objects) == 2
    assert [d.class_name for d in records["i0"].objects] == ["cat", "dog"]


def test_read_detections_empty_marker(tmp_path):
    path = write_lines(tmp_path, [HEADER, {"image_id": "i1", "prompt_id": "p0",
                                           "empty": True}])
    records, _ = read_detections(path)
    assert records["i1"].objects == []


def test_read_detections_errors(tmp_path):
    with pytest.raises(MissingFile):
        read_detections(str(tmp_path / "absent.jsonl"))
    for lines in (
        [{"schema": "bogus.v1"}, ROW],
        [dict(HEADER, depth_convention="sideways"), ROW],
        [HEADER, {"image_id": "i0"}],  # missing fields
        [HEADER, dict(ROW, cx=99.0)],  # centroid outside bbox
        [HEADER, {"empty": True}],  # marker without ids
    ):
        with pytest.raises(SchemaViolation):
            read_detections(write_lines(tmp_path, lines))
    (tmp_path / "det.jsonl").write_text("")
    with pytest.raises(SchemaViolation):
        read_detections(str(tmp_path / "det.jsonl"))
    (tmp_path / "det.jsonl").write_text('{"schema": "detections.v1"}\nnot json\n')
    with pytest.raises(SchemaViolation):
        read_detections(str(tmp_path / "det.jsonl"))
