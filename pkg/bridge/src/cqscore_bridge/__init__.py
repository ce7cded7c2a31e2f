"""Training-loop bindings for the category/quantity alignment reward.

A thin layer over the core package so the reward can be dropped into a
fine-tuning loop: raw boxes in, scalar reward/loss out, plus a per-class
diagnostic breakdown. No formula logic lives here; everything delegates to
the core, and the parity test suite checks that.
"""

from .bridge import (
    BridgeClassBreakdown,
    BridgeOptions,
    BridgeScore,
    bridge_reward_loss,
    bridge_score,
)

# Core operations re-exported for training code that wants the pieces.
from cqscore import (
    combined_loss,
    filter_and_nms,
    parse_prompt,
    reward,
    reward_loss,
    score_pair,
    summarize,
)

__version__ = "0.1.0"
