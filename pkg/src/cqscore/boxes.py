"""Detection-box ingestion and post-processing.

Raw detector outputs are reduced in two steps: confidence filtering plus
class-wise greedy NMS, then summarization into per-class counts and summed
confidences. All functions are pure; boxes use corner coordinates
(x1, y1, x2, y2) with continuous areas and no pixel correction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class InvalidInputError(ValueError):
    """A value violates an operation's preconditions."""


Box = tuple[float, float, float, float]


@dataclass(frozen=True)
class DetectionBox:
    label: str
    confidence: float
    box: Box

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise InvalidInputError(
                f"confidence {self.confidence!r} outside [0, 1] for label {self.label!r}"
            )
        x1, y1, x2, y2 = self.box
        if not (x1 < x2 and y1 < y2):
            raise InvalidInputError(
                f"degenerate box {self.box!r}: requires x1 < x2 and y1 < y2"
            )


@dataclass(frozen=True)
class PostprocessConfig:
    confidence_cutoff: float = 0.8
    iou_cutoff: float = 0.5

    def __post_init__(self) -> None:
        for name in ("confidence_cutoff", "iou_cutoff"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidInputError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class ClassStat:
    count: int
    total_confidence: float


@dataclass(frozen=True)
class DetectionSummary:
    """Per-class (count, summed confidence) after filtering and NMS."""

    classes: dict[str, ClassStat]

    @property
    def n_c(self) -> int:
        return len(self.classes)

    @classmethod
    def from_pairs(cls, pairs: dict[str, tuple[int, float]]) -> "DetectionSummary":
        return cls({label: ClassStat(c, p) for label, (c, p) in pairs.items()})


def _area(box: Box) -> float:
    x1, y1, x2, y2 = box
    return (x2 - x1) * (y2 - y1)


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two corner-format boxes; 0 when disjoint."""
    if _area(a) <= 0.0 or _area(b) <= 0.0:
        raise InvalidInputError(f"zero-area box in iou: {a!r} vs {b!r}")
    ix1 = max(a[0], b[0])
    iy1 = max(a[1], b[1])
    ix2 = min(a[2], b[2])
    iy2 = min(a[3], b[3])
    iw = ix2 - ix1
    ih = iy2 - iy1
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (_area(a) + _area(b) - inter)


def filter_and_nms(
    boxes: list[DetectionBox], cfg: PostprocessConfig | None = None
) -> list[DetectionBox]:
    """Drop low-confidence boxes, then greedy class-wise NMS.

    Boxes with confidence below the cutoff are discarded (exactly at the
    cutoff survives). Survivors are visited in descending confidence (ties
    keep input order); a box is kept iff its IoU with every already-kept box
    of the same label is <= the IoU cutoff. Output order is descending
    confidence with input-order tie-break.
    """
    if cfg is None:
        cfg = PostprocessConfig()
    survivors = [b for b in boxes if b.confidence >= cfg.confidence_cutoff]
    ordered = sorted(survivors, key=lambda b: -b.confidence)  # stable: ties keep input order
    kept: list[DetectionBox] = []
    for cand in ordered:
        if all(
            iou(cand.box, k.box) <= cfg.iou_cutoff
            for k in kept
            if k.label == cand.label
        ):
            kept.append(cand)
    return kept


def summarize(boxes: list[DetectionBox]) -> DetectionSummary:
    """Reduce already-filtered boxes to per-class counts and confidence sums.

    Does not re-filter; compose with filter_and_nms. Class order follows
    first appearance in the input.
    """
    classes: dict[str, ClassStat] = {}
    for b in boxes:
        prev = classes.get(b.label)
        if prev is None:
            classes[b.label] = ClassStat(1, b.confidence)
        else:
            classes[b.label] = ClassStat(prev.count + 1, prev.total_confidence + b.confidence)
    return DetectionSummary(classes)


@dataclass
class ImageDetections:
    image_id: str
    boxes: list[DetectionBox]
    warnings: list[str]


def _parse_entry(entry: object, index: int) -> ImageDetections:
    if not isinstance(entry, dict) or "image_id" not in entry:
        raise InvalidInputError(f"entry {index}: expected object with an 'image_id' field")
    image_id = str(entry["image_id"])
    raw_boxes = entry.get("boxes", [])
    if not isinstance(raw_boxes, list):
        raise InvalidInputError(f"entry {index} ({image_id}): 'boxes' must be a list")
    boxes: list[DetectionBox] = []
    warnings: list[str] = []
    for i, raw in enumerate(raw_boxes):
        try:
            if not isinstance(raw, dict):
                raise InvalidInputError("box is not an object")
            bbox = raw["bbox"]
            if not (isinstance(bbox, list) and len(bbox) == 4):
                raise InvalidInputError("bbox must be [x1, y1, x2, y2]")
            boxes.append(
                DetectionBox(
                    label=str(raw["label"]),
                    confidence=float(raw["confidence"]),
                    box=tuple(float(v) for v in bbox),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            warnings.append(f"image {image_id} box {i}: {exc}")
    return ImageDetections(image_id, boxes, warnings)


def load_detections(path: str | Path) -> list[ImageDetections]:
    """Load a detection input file: one image object or a JSON array of them.

    Malformed box entries are reported via per-image warnings and skipped;
    a structurally invalid file raises InvalidInputError.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read detections from {path}: {exc}") from exc
    entries = data if isinstance(data, list) else [data]
    return [_parse_entry(e, i) for i, e in enumerate(entries)]
