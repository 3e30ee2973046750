"""Confidence measures over stereo matching cost volumes."""

from .catalog import (ALL_IDS, CATALOG, MeasureSpec, compute_measure,
                      evaluable_ids, parse_measure_id, resolve_measure_tokens)
from .inputs import MeasureInputs, MeasureParams, prepare_inputs

__all__ = [
    "ALL_IDS", "CATALOG", "MeasureSpec", "compute_measure", "evaluable_ids",
    "parse_measure_id", "resolve_measure_tokens",
    "MeasureInputs", "MeasureParams", "prepare_inputs",
]
