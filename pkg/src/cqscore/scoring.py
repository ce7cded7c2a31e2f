"""Category/quantity matching scores and the reward/loss formulas.

acc: mean over detected classes of per-class mean box confidence, zeroed for
classes absent from the prompt. aqc: mean over detected classes of the mean
min/max count ratio against every prompt class count (the cross-class double
sum is implemented verbatim, with no label matching). cq: harmonic mean of
the two. The reward is cq; the loss side applies a configurable mapping
(default negation) and a weighting factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .boxes import DetectionBox, DetectionSummary, InvalidInputError, PostprocessConfig, filter_and_nms, summarize
from .lexicon import Lexicon
from .parsing import CategoryCountMap, parse_prompt

PHI_FUNCTIONS: dict[str, Callable[[float], float]] = {
    "negate": lambda r: -r,
    "one_minus": lambda r: 1.0 - r,
}


@dataclass(frozen=True)
class AlignmentScore:
    acc: float
    aqc: float
    cq: float


@dataclass(frozen=True)
class RewardConfig:
    reward_weight: float = 1.0  # the loss-mixing weight, >= 0
    phi: str = "negate"

    def __post_init__(self) -> None:
        if self.reward_weight < 0:
            raise InvalidInputError(f"reward_weight must be >= 0, got {self.reward_weight}")
        if self.phi not in PHI_FUNCTIONS:
            raise InvalidInputError(f"unknown phi {self.phi!r}, options: {sorted(PHI_FUNCTIONS)}")

    def phi_fn(self) -> Callable[[float], float]:
        return PHI_FUNCTIONS[self.phi]


def acc(det: DetectionSummary, prompt: CategoryCountMap) -> float:
    """Average category confidence. 0 when nothing was detected."""
    if det.n_c == 0:
        return 0.0
    total = 0.0
    for label, stat in det.classes.items():
        if label in prompt.entries:
            total += stat.total_confidence / stat.count
    return total / det.n_c


def aqc(det: DetectionSummary, prompt: CategoryCountMap) -> float:
    """Average quantity confidence. 0 when either side is empty."""
    if det.n_c == 0 or prompt.n_c == 0:
        return 0.0
    total = 0.0
    for stat in det.classes.values():
        inner = 0.0
        for want in prompt.entries.values():
            inner += min(stat.count, want) / max(stat.count, want)
        total += inner / prompt.n_c
    return total / det.n_c


def cq_score(acc_value: float, aqc_value: float) -> float:
    """Harmonic mean of the two confidences; 0 when both are 0."""
    if acc_value + aqc_value == 0.0:
        return 0.0
    return 2.0 * acc_value * aqc_value / (acc_value + aqc_value)


def score(det: DetectionSummary, prompt: CategoryCountMap) -> AlignmentScore:
    a = acc(det, prompt)
    q = aqc(det, prompt)
    return AlignmentScore(a, q, cq_score(a, q))


def score_pair(
    boxes: list[DetectionBox],
    prompt_text: str,
    cfg: PostprocessConfig | None = None,
    lex: Lexicon | None = None,
) -> AlignmentScore:
    """Full pipeline: filter + NMS, summarize, parse, score."""
    det = summarize(filter_and_nms(boxes, cfg))
    prompt = parse_prompt(prompt_text, lex)
    return score(det, prompt)


def reward(alignment: AlignmentScore) -> float:
    return alignment.cq


def reward_loss(r: float, cfg: RewardConfig | None = None) -> float:
    """phi(r); the weighting factor is applied in combined_loss."""
    if cfg is None:
        cfg = RewardConfig()
    return cfg.phi_fn()(r)


def combined_loss(l_pretrain: float, l_reward: float, cfg: RewardConfig | None = None) -> float:
    if cfg is None:
        cfg = RewardConfig()
    if not (math.isfinite(l_pretrain) and math.isfinite(l_reward)):
        raise InvalidInputError(
            f"combined_loss requires finite inputs, got {l_pretrain!r}, {l_reward!r}"
        )
    return l_pretrain + cfg.reward_weight * l_reward
