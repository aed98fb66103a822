"""Toy-scale pruning of multilingual decoder models with translation-
demonstration calibration, plus the analyses and evaluations around it."""

__version__ = "0.1.0"

from .analysis import (
    OverlapMatrix,
    QuadrantSummary,
    RankedFeatures,
    overlap_matrix,
    overlap_ratio,
    quadrant_averages,
    top_bottom_sets,
    topk_report,
    unique_dim_ratio,
)
from .config import ModelConfig
from .demos import (
    BilingualPair,
    CalibrationSet,
    Demonstration,
    MonolingualKind,
    TranslationKind,
    assemble_calibration,
    build_monolingual_demo,
    build_translation_demo,
    build_translation_prompt,
    load_bilingual_tsv,
)
from .errors import PolypruneError
from .evaluation import (
    ClozeTask,
    EvalExample,
    PredictionRanking,
    accuracy,
    classify_zero_shot,
    corpus_bleu,
    marc_task,
    paired_bootstrap,
    render_prompt,
    xnli_task,
)
from .pruning import (
    PruneMask,
    apply_mask,
    build_mask,
    load_mask,
    ratio_scores,
    save_mask,
    wanda_scores,
)
from .rankc import consistency, precision_at_j, rank_weights, rankc
from .stats import ActivationStats, load_stats, merge_stats, save_stats
from .tokenizer import EOS_MARKER, ByteTokenizer, VocabTokenizer
from .transformer import GenParams, forward_with_capture, generate, sequence_log_prob
from .weights import WeightStore, load_weights, random_weights, save_weights

__all__ = [
    "__version__",
    "ActivationStats",
    "BilingualPair",
    "ByteTokenizer",
    "CalibrationSet",
    "ClozeTask",
    "Demonstration",
    "EOS_MARKER",
    "EvalExample",
    "GenParams",
    "ModelConfig",
    "MonolingualKind",
    "OverlapMatrix",
    "PolypruneError",
    "PredictionRanking",
    "PruneMask",
    "QuadrantSummary",
    "RankedFeatures",
    "TranslationKind",
    "VocabTokenizer",
    "WeightStore",
    "accuracy",
    "apply_mask",
    "assemble_calibration",
    "build_mask",
    "build_monolingual_demo",
    "build_translation_demo",
    "build_translation_prompt",
    "classify_zero_shot",
    "consistency",
    "corpus_bleu",
    "forward_with_capture",
    "generate",
    "load_bilingual_tsv",
    "load_mask",
    "load_stats",
    "load_weights",
    "marc_task",
    "merge_stats",
    "overlap_matrix",
    "overlap_ratio",
    "paired_bootstrap",
    "precision_at_j",
    "quadrant_averages",
    "random_weights",
    "rank_weights",
    "rankc",
    "ratio_scores",
    "render_prompt",
    "save_mask",
    "save_stats",
    "save_weights",
    "sequence_log_prob",
    "top_bottom_sets",
    "topk_report",
    "unique_dim_ratio",
    "wanda_scores",
    "xnli_task",
]
