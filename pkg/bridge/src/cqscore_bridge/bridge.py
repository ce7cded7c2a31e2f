from __future__ import annotations

from dataclasses import dataclass, field

from cqscore import (
    DetectionBox,
    Lexicon,
    PostprocessConfig,
    RewardConfig,
    filter_and_nms,
    parse_prompt,
    reward_loss,
    summarize,
)
from cqscore.scoring import score


@dataclass(frozen=True)
class BridgeOptions:
    confidence_cutoff: float = 0.8
    iou_cutoff: float = 0.5
    lexicon: Lexicon | None = None


@dataclass(frozen=True)
class BridgeClassBreakdown:
    label: str
    count: int
    total_confidence: float
    matched: bool  # label present in the prompt's category set


@dataclass(frozen=True)
class BridgeScore:
    acc: float
    aqc: float
    cq: float
    classes: list[BridgeClassBreakdown] = field(default_factory=list)


RawBox = tuple[str, float, tuple[float, float, float, float]]


def bridge_score(
    boxes: list[RawBox], prompt: str, options: BridgeOptions | None = None
) -> BridgeScore:
    """Score raw (label, confidence, bbox) tuples against a prompt.

    Delegates the full pipeline to the core; raises the core's exceptions
    on invalid boxes.
    """
    if options is None:
        options = BridgeOptions()
    cfg = PostprocessConfig(options.confidence_cutoff, options.iou_cutoff)
    parsed = [DetectionBox(label, confidence, tuple(bbox)) for label, confidence, bbox in boxes]
    det = summarize(filter_and_nms(parsed, cfg))
    wanted = parse_prompt(prompt, options.lexicon)
    result = score(det, wanted)
    breakdown = [
        BridgeClassBreakdown(label, stat.count, stat.total_confidence, label in wanted.entries)
        for label, stat in det.classes.items()
    ]
    return BridgeScore(result.acc, result.aqc, result.cq, breakdown)


def bridge_reward_loss(cq: float, reward_weight: float) -> float:
    """Weighted reward-driven loss for the training loop: weight * phi(cq)."""
    cfg = RewardConfig(reward_weight=reward_weight)
    return reward_weight * reward_loss(cq, cfg)
