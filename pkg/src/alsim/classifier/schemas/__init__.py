"""
Schemas for the softmax classifier, its optimizer state and targets.
"""

from .base import (
    ClassifierConfig,
    AdamState,
    ClassifierModel,
    TargetSet,
    TargetMode,
    EvaluationMetrics
)

__all__ = [
    'ClassifierConfig',
    'AdamState',
    'ClassifierModel',
    'TargetSet',
    'TargetMode',
    'EvaluationMetrics'
]
