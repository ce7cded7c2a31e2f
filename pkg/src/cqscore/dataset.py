"""Seeded generation of the compositional prompt dataset.

Prompts are rendered from templates over a quantity set and a category set;
nouns with quantity >= 2 are pluralized. Generation is deterministic for a
fixed seed and refuses configurations whose combinatorial space is smaller
than the requested total. Candidate filtering consumes externally supplied
scores and returns the ranked shortlist above a threshold.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

from .lexicon import Lexicon, default_lexicon
from .parsing import CategoryCountMap

# MS-COCO 2017 class names: the default category set, so generated prompts
# stay inside the detector vocabulary.
COCO_CLASSES: tuple[str, ...] = (
    "person", "bicycle", "car", "motorcycle", "airplane", "bus", "train",
    "truck", "boat", "traffic light", "fire hydrant", "stop sign",
    "parking meter", "bench", "bird", "cat", "dog", "horse", "sheep", "cow",
    "elephant", "bear", "zebra", "giraffe", "backpack", "umbrella", "handbag",
    "tie", "suitcase", "frisbee", "skis", "snowboard", "sports ball", "kite",
    "baseball bat", "baseball glove", "skateboard", "surfboard",
    "tennis racket", "bottle", "wine glass", "cup", "fork", "knife", "spoon",
    "bowl", "banana", "apple", "sandwich", "orange", "broccoli", "carrot",
    "hot dog", "pizza", "donut", "cake", "chair", "couch", "potted plant",
    "bed", "dining table", "toilet", "tv", "laptop", "mouse", "remote",
    "keyboard", "cell phone", "microwave", "oven", "toaster", "sink",
    "refrigerator", "book", "clock", "vase", "scissors", "teddy bear",
    "hair drier", "toothbrush",
)

DEFAULT_QUANTITY_WORDS: tuple[str, ...] = (
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
)

DEFAULT_TEMPLATES: tuple[str, ...] = (
    "<q1> <c1>",
    "<q1> <c1> and <q2> <c2>",
    "<q1> <c1>, <q2> <c2> and <q3> <c3>",
    "<q1> <c1>, <q2> <c2>, <q3> <c3> and <q4> <c4>",
    "<q1> <c1> on the prairie",
    "<q1> <c1> and <q2> <c2> on the prairie",
    "<q1> <c1> on the estate",
    "<q1> <c1> and <q2> <c2> on the estate",
)

_SLOT_RE = re.compile(r"<([qc])(\d+)>")


class InsufficientSpaceError(ValueError):
    """The template/word space cannot produce the requested prompt count."""


@dataclass(frozen=True)
class PromptSpec:
    text: str
    truth: CategoryCountMap
    template_id: str
    seed_index: int

    def to_record(self) -> dict:
        return {
            "id": f"p{self.seed_index:04d}",
            "text": self.text,
            "truth": dict(self.truth.entries),
            "template_id": self.template_id,
            "seed_index": self.seed_index,
        }

    @classmethod
    def from_record(cls, record: dict) -> "PromptSpec":
        return cls(
            text=record["text"],
            truth=CategoryCountMap({str(k): int(v) for k, v in record["truth"].items()}),
            template_id=str(record.get("template_id", "")),
            seed_index=int(record.get("seed_index", 0)),
        )


@dataclass(frozen=True)
class GenConfig:
    quantity_set: tuple[str, ...] = DEFAULT_QUANTITY_WORDS
    category_set: tuple[str, ...] = COCO_CLASSES
    templates: tuple[str, ...] = DEFAULT_TEMPLATES
    total: int = 1700
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not (self.quantity_set and self.category_set and self.templates):
            raise ValueError("quantity_set, category_set and templates must be nonempty")
        if self.total < 1:
            raise ValueError(f"total must be >= 1, got {self.total}")

    @classmethod
    def from_file(cls, path: str | Path) -> "GenConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        kwargs = {}
        for key in ("quantity_set", "category_set", "templates"):
            if key in data:
                kwargs[key] = tuple(data[key])
        for key in ("total", "rng_seed"):
            if key in data:
                kwargs[key] = int(data[key])
        return cls(**kwargs)


def _template_arity(template: str) -> int:
    slots = _SLOT_RE.findall(template)
    return max((int(n) for _, n in slots), default=0)


def render_template(
    template: str,
    quantities: list[str],
    categories: list[str],
    lex: Lexicon,
) -> str:
    """Fill a template; categories pluralize when their quantity is not one."""

    def fill(match: re.Match) -> str:
        kind, idx = match.group(1), int(match.group(2)) - 1
        if kind == "q":
            return quantities[idx]
        noun = categories[idx]
        if lex.quantity_value(quantities[idx]) != 1:
            noun = lex.pluralize(noun)
        return noun

    return _SLOT_RE.sub(fill, template)


def _space_size(cfg: GenConfig) -> int:
    n_c = len(cfg.category_set)
    n_q = len(cfg.quantity_set)
    total = 0
    for template in cfg.templates:
        k = _template_arity(template)
        if k > n_c:
            continue
        total += math.perm(n_c, k) * n_q**k
    return total


def _build_prompt(
    cfg: GenConfig,
    lex: Lexicon,
    template_index: int,
    quantities: list[str],
    categories: list[str],
    seed_index: int,
) -> PromptSpec:
    template = cfg.templates[template_index]
    text = render_template(template, quantities, categories, lex)
    truth: dict[str, int] = {}
    for qword, cat in zip(quantities, categories):
        value = lex.quantity_value(qword)
        if value is None:
            raise ValueError(f"quantity word {qword!r} unknown to the lexicon")
        truth[cat] = truth.get(cat, 0) + value
    return PromptSpec(text, CategoryCountMap(truth), f"t{template_index}", seed_index)


def generate_prompts(cfg: GenConfig | None = None, lex: Lexicon | None = None) -> list[PromptSpec]:
    """Generate cfg.total distinct prompts, deterministically for a fixed seed.

    When the total is large enough, a deterministic first pass guarantees
    every category and quantity word appears at least once; the remainder is
    filled by seeded random combination.
    """
    if cfg is None:
        cfg = GenConfig()
    if lex is None:
        lex = default_lexicon()
    space = _space_size(cfg)
    if cfg.total > space:
        raise InsufficientSpaceError(
            f"requested {cfg.total} prompts but the configuration space has only "
            f"{space} (short by {cfg.total - space})"
        )

    rng = random.Random(cfg.rng_seed)
    arities = [_template_arity(t) for t in cfg.templates]
    usable = [i for i, k in enumerate(arities) if k <= len(cfg.category_set)]
    single = next((i for i in usable if arities[i] == 1), None)

    prompts: list[PromptSpec] = []
    seen: set[str] = set()

    def push(spec: PromptSpec) -> bool:
        if spec.text in seen:
            return False
        seen.add(spec.text)
        prompts.append(spec)
        return True

    if single is not None and cfg.total >= len(cfg.quantity_set) * len(cfg.category_set):
        for i in range(max(len(cfg.quantity_set), len(cfg.category_set))):
            qword = cfg.quantity_set[i % len(cfg.quantity_set)]
            cat = cfg.category_set[i % len(cfg.category_set)]
            push(_build_prompt(cfg, lex, single, [qword], [cat], len(prompts)))

    stall = 0
    while len(prompts) < cfg.total:
        template_index = rng.choice(usable)
        k = arities[template_index]
        categories = rng.sample(cfg.category_set, k)
        quantities = [rng.choice(cfg.quantity_set) for _ in range(k)]
        if push(_build_prompt(cfg, lex, template_index, quantities, categories, len(prompts))):
            stall = 0
        else:
            stall += 1
            if stall > 10000:
                raise InsufficientSpaceError(
                    f"could not find {cfg.total} distinct prompts "
                    f"(stalled at {len(prompts)})"
                )
    return prompts


def write_prompts(prompts: list[PromptSpec], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for spec in prompts:
            f.write(json.dumps(spec.to_record(), sort_keys=True) + "\n")


def load_prompts(path: str | Path) -> list[PromptSpec]:
    specs = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                specs.append(PromptSpec.from_record(json.loads(line)))
    return specs


def filter_candidates(
    scores: list[tuple[str, float]], threshold: float
) -> list[str]:
    """Ids with score strictly above the threshold, best first (ties by id)."""
    for cid, value in scores:
        if not math.isfinite(value):
            raise ValueError(f"non-finite score for candidate {cid!r}: {value!r}")
    kept = [(cid, value) for cid, value in scores if value > threshold]
    kept.sort(key=lambda item: (-item[1], item[0]))
    return [cid for cid, _ in kept]
