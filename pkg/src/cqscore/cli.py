"""Command-line entry point for the scoring pipeline.

Subcommands: parse, postprocess, score, generate, filter, suite, bench.
Exit codes: 0 success, 2 input-format error, 3 cross-file consistency error.
Per-line problems (an unparseable prompt, a malformed box entry) warn and
continue; structural problems abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from . import report
from .boxes import InvalidInputError, PostprocessConfig, load_detections, filter_and_nms, summarize
from .bench import ConsistencyError, MethodRun, ScoreRecord, aggregate, generate_suite, load_suite, write_suite
from .dataset import (
    GenConfig,
    InsufficientSpaceError,
    filter_candidates,
    generate_prompts,
    write_prompts,
)
from .lexicon import Lexicon, default_lexicon, load_lexicon
from .parsing import parse_prompt
from .scoring import RewardConfig, reward_loss, score_pair

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_CONSISTENCY = 3

EXTRA_METRIC_KEYS = ("clip", "blip", "fid")


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _load_lexicon(path: str | None) -> Lexicon:
    return load_lexicon(path) if path else default_lexicon()


def _open_output(path: str | None):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def _read_lines(path: str) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc


def cmd_parse(args: argparse.Namespace) -> int:
    lex = _load_lexicon(args.lexicon)
    lines = _read_lines(args.prompt_file)
    out = _open_output(args.output)
    try:
        for lineno, line in enumerate(lines, start=1):
            text = line.strip()
            if not text:
                continue
            mapping = parse_prompt(text, lex)
            if not mapping:
                _warn(f"line {lineno}: no category found in {text!r}")
            out.write(json.dumps(mapping.entries) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_postprocess(args: argparse.Namespace) -> int:
    cfg = PostprocessConfig(args.conf_threshold, args.iou_threshold)
    images = load_detections(args.detections)
    out = _open_output(args.output)
    try:
        for image in images:
            for message in image.warnings:
                _warn(message)
            summary = summarize(filter_and_nms(image.boxes, cfg))
            out.write(
                json.dumps(
                    {
                        "image_id": image.image_id,
                        "n_c": summary.n_c,
                        "classes": {
                            label: {"count": s.count, "total_confidence": s.total_confidence}
                            for label, s in summary.classes.items()
                        },
                    }
                )
                + "\n"
            )
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _load_prompt_records(path: str) -> list[dict]:
    records = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict) or "image_id" not in record or "prompt" not in record:
            raise InvalidInputError(
                f"{path}:{lineno}: expected object with 'image_id' and 'prompt'"
            )
        records.append(record)
    return records


def cmd_score(args: argparse.Namespace) -> int:
    lex = _load_lexicon(args.lexicon)
    cfg = PostprocessConfig(args.conf_threshold, args.iou_threshold)
    images = {img.image_id: img for img in load_detections(args.detections)}
    prompts = _load_prompt_records(args.prompts)
    prompt_ids = [r["image_id"] for r in prompts]

    orphan_prompts = [i for i in prompt_ids if i not in images]
    orphan_images = [i for i in images if i not in set(prompt_ids)]
    if orphan_prompts or orphan_images:
        raise ConsistencyError(
            f"id mismatch between detections and prompts: "
            f"prompts without detections {orphan_prompts}, "
            f"detections without prompts {orphan_images}"
        )

    out = _open_output(args.output)
    try:
        for record in prompts:
            image = images[record["image_id"]]
            for message in image.warnings:
                _warn(message)
            result = score_pair(image.boxes, record["prompt"], cfg, lex)
            row = {
                "image_id": image.image_id,
                "prompt": record["prompt"],
                "acc": result.acc,
                "aqc": result.aqc,
                "cq": result.cq,
            }
            if args.reward_weight is not None:
                reward_cfg = RewardConfig(reward_weight=args.reward_weight)
                row["loss"] = args.reward_weight * reward_loss(result.cq, reward_cfg)
            out.write(json.dumps(row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    if args.config:
        cfg = GenConfig.from_file(args.config)
    else:
        cfg = GenConfig()
    overrides = {}
    if args.total is not None:
        overrides["total"] = args.total
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if overrides:
        cfg = GenConfig(
            quantity_set=cfg.quantity_set,
            category_set=cfg.category_set,
            templates=cfg.templates,
            total=overrides.get("total", cfg.total),
            rng_seed=overrides.get("rng_seed", cfg.rng_seed),
        )
    prompts = generate_prompts(cfg, _load_lexicon(args.lexicon))
    if args.output:
        write_prompts(prompts, args.output)
    else:
        for spec in prompts:
            print(json.dumps(spec.to_record(), sort_keys=True))
    return EXIT_OK


def cmd_filter(args: argparse.Namespace) -> int:
    scores: list[tuple[str, float]] = []
    try:
        with open(args.scores, newline="", encoding="utf-8") as f:
            for lineno, row in enumerate(csv.reader(f), start=1):
                if not row:
                    continue
                if lineno == 1 and row[0].strip().lower() == "candidate_id":
                    continue  # optional header
                if len(row) < 2:
                    raise InvalidInputError(f"{args.scores}:{lineno}: expected candidate_id,score")
                try:
                    scores.append((row[0].strip(), float(row[1])))
                except ValueError as exc:
                    raise InvalidInputError(f"{args.scores}:{lineno}: bad score {row[1]!r}") from exc
    except OSError as exc:
        raise InvalidInputError(f"cannot read {args.scores}: {exc}") from exc
    kept = filter_candidates(scores, args.threshold)
    out = _open_output(args.output)
    try:
        for cid in kept:
            out.write(cid + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_suite(args: argparse.Namespace) -> int:
    suite = generate_suite(
        args.kind,
        [c.strip() for c in args.categories.split(",") if c.strip()],
        args.max_n,
        seed=args.seed if args.seed is not None else 0,
        composition_tag=args.tag,
        scene_suffix=args.suffix,
        lex=_load_lexicon(args.lexicon),
    )
    write_suite(suite, args.output)
    return EXIT_OK


def _method_records(
    method_dir: Path, suite, cfg: PostprocessConfig, lex: Lexicon
) -> list[ScoreRecord]:
    extras_by_id: dict[str, dict[str, float]] = {}
    metrics_path = method_dir / "metrics.json"
    if metrics_path.exists():
        raw = json.loads(metrics_path.read_text(encoding="utf-8"))
        for rid, metrics in raw.items():
            extras_by_id[str(rid)] = {
                k: float(v) for k, v in metrics.items() if k in EXTRA_METRIC_KEYS
            }

    scores_path = method_dir / "scores.jsonl"
    records: list[ScoreRecord] = []
    if scores_path.exists():
        for lineno, line in enumerate(scores_path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InvalidInputError(f"{scores_path}:{lineno}: invalid JSON: {exc}") from exc
            rid = str(row.get("image_id", row.get("id", "")))
            extras = {k: float(row[k]) for k in EXTRA_METRIC_KEYS if k in row}
            extras.update(extras_by_id.get(rid, {}))
            records.append(
                ScoreRecord(rid, float(row["acc"]), float(row["aqc"]), float(row["cq"]), extras)
            )
        return records

    for spec in suite.prompts:
        rid = spec.to_record()["id"]
        det_path = method_dir / f"{rid}.json"
        if not det_path.exists():
            raise ConsistencyError(f"method {method_dir.name!r}: missing detections for {rid}")
        images = load_detections(det_path)
        boxes = [b for img in images for b in img.boxes]
        result = score_pair(boxes, spec.text, cfg, lex)
        records.append(ScoreRecord(rid, result.acc, result.aqc, result.cq, extras_by_id.get(rid, {})))
    return records


def cmd_bench(args: argparse.Namespace) -> int:
    lex = _load_lexicon(args.lexicon)
    cfg = PostprocessConfig(args.conf_threshold, args.iou_threshold)
    suite = load_suite(args.suite)
    runs_dir = Path(args.runs_dir)
    if not runs_dir.is_dir():
        raise ConsistencyError(f"runs directory not found: {runs_dir}")
    method_dirs = sorted(p for p in runs_dir.iterdir() if p.is_dir())
    if not method_dirs:
        raise ConsistencyError(f"no method directories in {runs_dir}")
    runs = [
        MethodRun(d.name, _method_records(d, suite, cfg, lex)) for d in method_dirs
    ]
    table = aggregate(runs)

    rendered = report.to_tsv(table) if args.format == "tsv" else report.to_json(table)
    out = _open_output(args.output)
    try:
        out.write(rendered)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.markdown:
        Path(args.markdown).write_text(report.to_markdown(table), encoding="utf-8")
    if args.figure:
        report.render_figure(table, args.figure)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqscore",
        description="Category/quantity text-image alignment scoring toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, thresholds: bool = False) -> None:
        p.add_argument("--lexicon", help="path to a lexicon JSON file")
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        if thresholds:
            p.add_argument(
                "--conf-threshold", type=float, default=0.8,
                help="confidence cutoff for detection boxes (default 0.8)",
            )
            p.add_argument(
                "--iou-threshold", type=float, default=0.5,
                help="IoU cutoff for class-wise NMS (default 0.5)",
            )

    p = sub.add_parser("parse", help="parse prompts (one per line) into category maps")
    p.add_argument("prompt_file")
    add_common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("postprocess", help="filter + NMS + summarize a detections file")
    p.add_argument("detections")
    add_common(p, thresholds=True)
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("score", help="score detection/prompt pairs")
    p.add_argument("--detections", required=True)
    p.add_argument("--prompts", required=True, help="JSON-lines with image_id and prompt")
    p.add_argument(
        "--lambda", dest="reward_weight", type=float, default=None,
        help="when set, also emit the weighted reward loss per record",
    )
    add_common(p, thresholds=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("generate", help="generate the compositional prompt dataset")
    p.add_argument("--config", help="GenConfig JSON file")
    p.add_argument("--total", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("filter", help="rank candidate ids with scores above a threshold")
    p.add_argument("--scores", required=True, help="CSV file: candidate_id,score")
    p.add_argument("--threshold", type=float, required=True)
    add_common(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("suite", help="generate an evaluation suite file")
    p.add_argument("--kind", required=True, help="suite kind or alias type1/type2/type3")
    p.add_argument("--categories", required=True, help="comma-separated category list")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tag", default="normal", choices=bench_mod.COMPOSITION_TAGS)
    p.add_argument("--suffix", default="on the prairie")
    p.add_argument("--lexicon", help="path to a lexicon JSON file")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("bench", help="score method runs against a suite and aggregate")
    p.add_argument("--suite", required=True)
    p.add_argument("--runs-dir", required=True)
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--markdown", help="also write a Markdown table here")
    p.add_argument("--figure", help="also render a bar-chart figure here (png/pdf)")
    add_common(p, thresholds=True)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (InvalidInputError, InsufficientSpaceError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
