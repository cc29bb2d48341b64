"""Single-switch text entry toolkit.

Two selection engines driven by one binary switch: a probabilistic
clock-based engine and a row-column scanning engine, plus the language
model, simulated users, metrics, and experiment harness used to study them.
"""

from .clickmodel import (ClickTimeDistribution, default_prior_distribution,
                         gaussian_distribution, init_from_calibration,
                         load_distribution, save_distribution,
                         uniform_distribution, wrap_offset)
from .core import (ALPHABET, FREQUENCY_ORDER, SPACE, Layout, LogEvent,
                   SessionLog, TargetId, TargetKind, build_nomon_layout,
                   build_picture_layout, build_rcs_layout, load_layout,
                   make_rng, principal_targets, save_layout)
from .lm import (CharNgramModel, LanguageModel, Prediction, WordBigramModel,
                 load_char_model, normalize_text, save_char_model,
                 save_vocabulary, train_language_model)
from .metrics import (PhraseMetrics, ReactionStats, bootstrap_ci,
                      final_error_rate, levenshtein, phrase_metrics, srt_dct)
from .nomon import NomonEngine, bit_reversed_slots, rotation_period
from .rcs import RcsEngine, ScanMode, extra_delay, scan_time
from .simuser import SimOutcome, SimUserConfig, run_phrase

__version__ = "1.0.0"

__all__ = [
    "ALPHABET", "FREQUENCY_ORDER", "SPACE",
    "CharNgramModel", "ClickTimeDistribution", "LanguageModel", "Layout",
    "LogEvent", "NomonEngine", "PhraseMetrics", "Prediction", "RcsEngine",
    "ReactionStats", "ScanMode", "SessionLog", "SimOutcome", "SimUserConfig",
    "TargetId", "TargetKind", "WordBigramModel",
    "bit_reversed_slots", "bootstrap_ci", "build_nomon_layout",
    "build_picture_layout", "build_rcs_layout", "default_prior_distribution",
    "extra_delay", "final_error_rate", "gaussian_distribution",
    "init_from_calibration", "levenshtein", "load_char_model",
    "load_distribution", "load_layout", "make_rng", "normalize_text",
    "phrase_metrics", "principal_targets", "rotation_period", "run_phrase",
    "save_char_model", "save_distribution", "save_layout", "save_vocabulary",
    "scan_time", "srt_dct", "train_language_model", "uniform_distribution",
    "wrap_offset",
]
