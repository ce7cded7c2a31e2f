"""Detection-feedback text-image alignment scoring toolkit."""

from .boxes import (
    ClassStat,
    DetectionBox,
    DetectionSummary,
    InvalidInputError,
    PostprocessConfig,
    filter_and_nms,
    iou,
    load_detections,
    summarize,
)
from .lexicon import Lexicon, default_lexicon, load_lexicon
from .parsing import CategoryCountMap, normalize_noun, parse_prompt
from .scoring import (
    AlignmentScore,
    RewardConfig,
    acc,
    aqc,
    combined_loss,
    cq_score,
    reward,
    reward_loss,
    score,
    score_pair,
)
from .dataset import (
    COCO_CLASSES,
    GenConfig,
    InsufficientSpaceError,
    PromptSpec,
    filter_candidates,
    generate_prompts,
)
from .bench import (
    AggregateTable,
    ConsistencyError,
    MethodRun,
    ScoreRecord,
    SuiteSpec,
    aggregate,
    generate_suite,
    load_suite,
    write_suite,
)

__version__ = "0.1.0"
