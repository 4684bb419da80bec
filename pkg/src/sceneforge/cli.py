"""Command-line entry point orchestrating the full pipeline.

One binary with subcommands: render, batch, edges, questions, score,
visor, export.  Exit codes: 0 ok, 1 usage, 2 data error, 3 internal.
Failures are emitted to stderr as machine-readable JSON records.
"""

from __future__ import annotations

import argparse
import json
import multiprocessing
import os
import sys

from . import guidance, pngio, revqa, visor
from .assets import AssetCatalog, load_default_manifest, load_manifest
from .config import Config
from .errors import MissingFile, SceneForgeError, SchemaViolation, WrongAxis
from .layout import diversify, solve
from .prompts import load_prompt_lines, parse_prompt
from .relations import Axis
from .render import render
from .scene import load_scene, serialize_scene, synthesize
from .seeds import derive_seed

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error({"error": "UsageError", "message": message, "context": {}})
        raise SystemExit(EXIT_USAGE)


def _emit_error(record: dict) -> None:
    print(json.dumps(record), file=sys.stderr)


def _load_catalog(args) -> AssetCatalog:
    if getattr(args, "manifest", None):
        return load_manifest(args.manifest)
    return load_default_manifest()


def _resolve_config(args) -> Config:
    config = Config.from_file(args.config) if getattr(args, "config", None) else Config()
    overrides = {}
    for flag, name in (
        ("size", "size"),
        ("bg", "background"),
        ("images_per_prompt", "images_per_prompt"),
        ("workers", "workers"),
        ("low", "canny_low"),
        ("high", "canny_high"),
        ("depth_convention", "depth_convention"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "no_diversify", False):
        overrides["diversify"] = False
    return config.replaced(**overrides)


def _out_dir(args) -> str:
    out = args.out_dir or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_render(args) -> int:
    config = _resolve_config(args)
    catalog = _load_catalog(args)
    out = _out_dir(args)
    seed = args.seed

    spec = parse_prompt(args.prompt, catalog)
    layout = solve(spec, seed, config.layout_config())
    if config.diversify:
        layout = diversify(layout, seed, config.jitter_config())
    scene = synthesize(layout, spec, catalog, config.background, seed)
    frames = render(scene, config.size, config.size)

    pngio.write_rgb(os.path.join(out, "rgb.png"), frames.rgb)
    pngio.write_depth(os.path.join(out, "depth.png"), frames.depth,
                      far_clip=config.far_clip)
    pngio.write_mask(os.path.join(out, "mask.png"), frames.id_mask)
    with open(os.path.join(out, "scene.json"), "w", encoding="utf-8") as fh:
        fh.write(serialize_scene(scene))
    records = guidance.detection_records("rgb.png", "prompt-0", frames, scene,
                                         depth_map="depth.png")
    guidance.write_detections(os.path.join(out, "detections.jsonl"), records,
                              depth_convention=config.depth_convention)
    with open(os.path.join(out, "run.json"), "w", encoding="utf-8") as fh:
        json.dump({"command": "render", "prompt": args.prompt, "seed": seed,
                   "config": config.to_dict()}, fh, indent=1)
        fh.write("\n")
    print(f"wrote rgb/depth/mask/scene/detections under {out}")
    return EXIT_OK


_WORKER_STATE: dict = {}


def _batch_init(manifest_path: str | None, config_dict: dict) -> None:
    _WORKER_STATE["catalog"] = (
        load_manifest(manifest_path) if manifest_path else load_default_manifest()
    )
    _WORKER_STATE["config"] = Config().replaced(**config_dict)


def _batch_item(task: tuple) -> tuple[int, str, dict | None, list[dict]]:
    index, prompt, prompt_id, image_index, seed, out_dir = task
    catalog = _WORKER_STATE["catalog"]
    config = _WORKER_STATE["config"]
    image_id = f"{prompt_id}/i{image_index}"
    try:
        os.makedirs(out_dir, exist_ok=True)
        spec = parse_prompt(prompt, catalog)
        layout = solve(spec, seed, config.layout_config())
        if config.diversify:
            layout = diversify(layout, seed, config.jitter_config())
        scene = synthesize(layout, spec, catalog, config.background, seed)
        frames = render(scene, config.size, config.size)
        pngio.write_rgb(os.path.join(out_dir, "rgb.png"), frames.rgb)
        pngio.write_depth(os.path.join(out_dir, "depth.png"), frames.depth,
                          far_clip=config.far_clip)
        pngio.write_mask(os.path.join(out_dir, "mask.png"), frames.id_mask)
        with open(os.path.join(out_dir, "scene.json"), "w", encoding="utf-8") as fh:
            fh.write(serialize_scene(scene))
        records = guidance.detection_records(
            image_id, prompt_id, frames, scene,
            depth_map=os.path.relpath(os.path.join(out_dir, "depth.png"),
                                      os.path.dirname(os.path.dirname(out_dir))),
        )
        return index, "ok", None, records
    except SceneForgeError as exc:
        return index, "error", exc.to_record(), []
    except Exception as exc:  # keep the batch running past broken items
        return index, "error", {"error": type(exc).__name__, "message": str(exc),
                                "context": {"internal": True}}, []


def cmd_batch(args) -> int:
    config = _resolve_config(args)
    out = _out_dir(args)
    prompts = load_prompt_lines(args.prompts)
    if not prompts:
        raise SchemaViolation("prompt file contains no prompts", field="prompts")
    master_seed = args.seed

    tasks = []
    index = 0
    for p, prompt in enumerate(prompts):
        prompt_id = f"p{p:04d}"
        for k in range(config.images_per_prompt):
            seed = derive_seed("batch", master_seed, p, k)
            item_dir = os.path.join(out, "items", f"{prompt_id}_i{k}")
            tasks.append((index, prompt, prompt_id, k, seed, item_dir))
            index += 1

    manifest_path = getattr(args, "manifest", None)
    results: list = [None] * len(tasks)
    if config.workers <= 1:
        _batch_init(manifest_path, config.to_dict())
        for task in tasks:
            result = _batch_item(task)
            results[result[0]] = result
    else:
        with multiprocessing.Pool(
            processes=config.workers,
            initializer=_batch_init,
            initargs=(manifest_path, config.to_dict()),
        ) as pool:
            for result in pool.imap_unordered(_batch_item, tasks):
                results[result[0]] = result

    detections: list[dict] = []
    items = []
    failures = 0
    for task, result in zip(tasks, results):
        index, prompt, prompt_id, k, seed, item_dir = task
        _, status, error, records = result
        detections.extend(records)
        if status != "ok":
            failures += 1
            _emit_error({"error": "BatchItemFailed",
                         "message": f"item {prompt_id}/i{k} failed",
                         "context": {"item": error}})
        items.append(
            {
                "prompt_id": prompt_id,
                "image_index": k,
                "prompt": prompt,
                "seed": seed,
                "dir": os.path.relpath(item_dir, out),
                "status": status,
                **({"error": error} if error else {}),
            }
        )

    guidance.write_detections(os.path.join(out, "detections.jsonl"), detections,
                              depth_convention=config.depth_convention)
    with open(os.path.join(out, "prompts.jsonl"), "w", encoding="utf-8") as fh:
        for p, prompt in enumerate(prompts):
            fh.write(json.dumps({"prompt_id": f"p{p:04d}", "prompt": prompt}) + "\n")
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump({"schema": "batch.v1", "seed": master_seed,
                   "config": config.to_dict(), "items": items}, fh, indent=1)
        fh.write("\n")
    print(f"batch: {len(tasks) - failures}/{len(tasks)} items ok under {out}")
    return EXIT_OK if failures == 0 else EXIT_DATA


def cmd_edges(args) -> int:
    config = _resolve_config(args)
    out = _out_dir(args)
    for path in args.images:
        if not os.path.isfile(path):
            raise MissingFile(f"image not found: {path}", path=path)
        rgb = pngio.read_rgb(path)
        edges = guidance.edge_map(rgb, config.canny_low, config.canny_high)
        stem = os.path.splitext(os.path.basename(path))[0]
        pngio.write_binary(os.path.join(out, f"{stem}.edges.png"), edges)
    print(f"wrote {len(args.images)} edge map(s) under {out}")
    return EXIT_OK


def cmd_questions(args) -> int:
    catalog = _load_catalog(args)
    out = _out_dir(args)
    out_path = os.path.join(out, "questions.jsonl")
    count = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for scene_path in args.scenes:
            scene = load_scene(scene_path)
            stem = os.path.splitext(os.path.basename(scene_path))[0]
            facts = revqa.facts_from_scene(scene)
            items = revqa.generate_questions(
                facts, catalog, derive_seed("questions", args.seed, stem)
            )
            for item in items:
                fh.write(json.dumps({
                    "id": f"{stem}/{item.qtype}",
                    "image": stem,
                    "qtype": item.qtype,
                    "question": item.question,
                    "answer": item.answer,
                }) + "\n")
                count += 1
    print(f"wrote {count} questions to {out_path}")
    return EXIT_OK


def _read_jsonl(path: str, what: str) -> list[dict]:
    if not os.path.isfile(path):
        raise MissingFile(f"{what} file not found: {path}", path=path)
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"{what} line {lineno}: {exc}",
                                      field=f"line {lineno}")
    return rows


def cmd_score(args) -> int:
    out = _out_dir(args)
    item_rows = _read_jsonl(args.items, "questions")
    response_rows = _read_jsonl(args.responses, "responses")
    items = []
    for row in item_rows:
        for key in ("id", "qtype", "answer"):
            if key not in row:
                raise SchemaViolation(f"question record missing {key!r}", field=key)
        items.append(revqa.QAItem(id=row["id"], qtype=row["qtype"],
                                  question=row.get("question", ""), ast=None,
                                  answer=row["answer"]))
    responses = {}
    for row in response_rows:
        if "id" not in row or "response_text" not in row:
            raise SchemaViolation(
                "response records need id and response_text fields", field="response"
            )
        responses[row["id"]] = row["response_text"]

    report = revqa.score_responses(items, responses)
    sys.stdout.write(report.to_text())
    with open(os.path.join(out, "score_report.txt"), "w", encoding="utf-8") as fh:
        fh.write(report.to_text())
    with open(os.path.join(out, "score_report.jsonl"), "w", encoding="utf-8") as fh:
        for record in report.to_records():
            fh.write(json.dumps(record) + "\n")
    return EXIT_OK


def cmd_visor(args) -> int:
    config = _resolve_config(args)
    catalog = _load_catalog(args)
    out = _out_dir(args)
    records, file_convention = visor.read_detections(args.detections)
    convention = args.depth_convention or file_convention
    base_dir = os.path.dirname(os.path.abspath(args.detections))

    prompt_rows = _read_jsonl(args.prompts, "prompts")
    triples = {}
    for row in prompt_rows:
        if "prompt_id" not in row or "prompt" not in row:
            raise SchemaViolation("prompt records need prompt_id and prompt",
                                  field="prompts")
        spec = parse_prompt(row["prompt"], catalog)
        if len(spec.triples) != 1:
            raise SchemaViolation(
                f"prompt {row['prompt_id']!r} has {len(spec.triples)} relations; "
                "spatial-fidelity judging needs exactly one",
                field=row["prompt_id"],
            )
        triple = spec.triples[0]
        if triple.kind.axis is Axis.NEAR:
            raise WrongAxis(
                f"prompt {row['prompt_id']!r} uses a near-family relation, which "
                "has no screen-order or depth-order ground truth",
                prompt_id=row["prompt_id"],
            )
        triples[row["prompt_id"]] = triple

    depth_cache: dict[str, object] = {}
    judgments = []
    for image_id in sorted(records):
        record = records[image_id]
        triple = triples.get(record.prompt_id)
        if triple is None:
            raise SchemaViolation(
                f"detections reference unknown prompt id {record.prompt_id!r}",
                field=record.prompt_id,
            )
        if triple.kind.axis is Axis.DEPTH:
            if not record.depth_map:
                raise MissingFile(
                    f"image {image_id!r} lacks a depth_map reference required "
                    "for depth judging",
                    path=image_id,
                )
            depth_path = record.depth_map
            if not os.path.isabs(depth_path):
                depth_path = os.path.join(base_dir, depth_path)
            if depth_path not in depth_cache:
                if not os.path.isfile(depth_path):
                    raise MissingFile(f"depth map not found: {depth_path}",
                                      path=depth_path)
                depth_cache[depth_path] = pngio.read_depth(depth_path)
            judgments.append(
                visor.judge_depth(record, depth_cache[depth_path], triple,
                                  convention=convention)
            )
        else:
            judgments.append(visor.judge_2d(record, triple))

    report = visor.aggregate(judgments, images_per_prompt=config.images_per_prompt)
    sys.stdout.write(report.to_text())
    with open(os.path.join(out, "visor_report.jsonl"), "w", encoding="utf-8") as fh:
        for record in report.to_records():
            fh.write(json.dumps(record) + "\n")
    return EXIT_OK


def cmd_export(args) -> int:
    out = _out_dir(args)
    scene = load_scene(args.scene)
    text = guidance.export_scene(scene, args.format)
    stem = os.path.splitext(os.path.basename(args.scene))[0]
    suffix = ".build.py" if args.format == "build-script" else ".scene.json"
    path = os.path.join(out, stem + suffix)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sceneforge",
                     description="Spatial prompt to rendered scene pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, manifest=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out-dir", help="output directory (default .)")
        if manifest:
            p.add_argument("--manifest", help="asset manifest path "
                                              "(default: shipped catalog)")

    p = sub.add_parser("render", help="render one prompt to frame files")
    common(p)
    p.add_argument("--prompt", required=True)
    p.add_argument("--bg", help="background name (White, Indoor, Outdoor)")
    p.add_argument("--size", type=int)
    p.add_argument("--no-diversify", action="store_true",
                   help="skip pose jitter; use the symmetric base layout")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("batch", help="render a prompt file to a dataset tree")
    common(p)
    p.add_argument("--prompts", required=True, help="newline-delimited prompts")
    p.add_argument("--bg")
    p.add_argument("--size", type=int)
    p.add_argument("--images-per-prompt", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-diversify", action="store_true")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("edges", help="edge maps from rendered images")
    common(p, manifest=False)
    p.add_argument("--low", type=float)
    p.add_argument("--high", type=float)
    p.add_argument("images", nargs="+", help="input RGB png paths")
    p.set_defaults(func=cmd_edges)

    p = sub.add_parser("questions", help="generate QA items from scene files")
    common(p)
    p.add_argument("scenes", nargs="+", help="scene.v1 json paths")
    p.set_defaults(func=cmd_questions)

    p = sub.add_parser("score", help="score model responses against QA items")
    common(p, manifest=False)
    p.add_argument("--items", required=True, help="questions jsonl")
    p.add_argument("--responses", required=True,
                   help="jsonl with id and response_text")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("visor", help="spatial-fidelity metrics from detections")
    common(p)
    p.add_argument("--detections", required=True)
    p.add_argument("--prompts", required=True,
                   help="jsonl with prompt_id and prompt")
    p.add_argument("--images-per-prompt", type=int)
    p.add_argument("--depth-convention", choices=visor.DEPTH_CONVENTIONS)
    p.set_defaults(func=cmd_visor)

    p = sub.add_parser("export", help="export a scene file")
    common(p, manifest=False)
    p.add_argument("--scene", required=True, help="scene.v1 json path")
    p.add_argument("--format", default="build-script",
                   choices=guidance.EXPORT_FORMATS)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SceneForgeError as exc:
        _emit_error(exc.to_record())
        return EXIT_DATA
    except SystemExit:
        raise
    except Exception as exc:
        _emit_error({"error": type(exc).__name__, "message": str(exc),
                     "context": {"internal": True}})
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
