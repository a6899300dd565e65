"""
Schemas for frames, pools, folds and metric records.
"""

from .base import (
    DEFAULT_CLASS_COUNT,
    Frame,
    Pool,
    FoldSpec,
    PoolSchema,
    MetricRecord,
    BalancedSubset
)

__all__ = [
    'DEFAULT_CLASS_COUNT',
    'Frame',
    'Pool',
    'FoldSpec',
    'PoolSchema',
    'MetricRecord',
    'BalancedSubset'
]
