"""
Post-processing of anonymized tables

This module includes the following features:
- Scaled ratio metrics and the confidence-interval reliability filter
- Daily or weekly publication per symptom and region
- Per-region scaling factors
- Writing the published dataset
"""

from .metrics import MetricRecord, compute_metric, confidence_interval, filter_unreliable

from .granularity import (
    GranularityParams,
    GranularityPlan,
    order_regions_by_activity,
    decide_granularity
)

from .scaling import ScalingFactor, calibrate_scaling, apply_scaling

from .publish import emit_dataset

__all__ = [
    'MetricRecord',
    'compute_metric',
    'confidence_interval',
    'filter_unreliable',
    'GranularityParams',
    'GranularityPlan',
    'order_regions_by_activity',
    'decide_granularity',
    'ScalingFactor',
    'calibrate_scaling',
    'apply_scaling',
    'emit_dataset'
]
