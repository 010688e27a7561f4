"""Sequence sources, features and the tracking loop."""

from .features import FeatureConfig, extract_features
from .io import IngestionError, load_sequence, parse_rect_line, write_sequence
from .synth import ScriptError, format_script, generate_sequence, load_script, parse_script
from .tracker import (SvmTrackConfig, TrackerConfig, localize, make_label, matched_fixed_config,
                      peak_shift, track)
from .types import CorruptionScript, OcclusionEvent, Rect, Sequence, SequenceError

__all__ = [
    "FeatureConfig", "extract_features", "IngestionError", "load_sequence", "parse_rect_line",
    "write_sequence", "ScriptError", "format_script", "generate_sequence", "load_script",
    "parse_script", "SvmTrackConfig", "TrackerConfig", "localize", "make_label",
    "matched_fixed_config", "peak_shift", "track", "CorruptionScript", "OcclusionEvent", "Rect",
    "Sequence", "SequenceError",
]
