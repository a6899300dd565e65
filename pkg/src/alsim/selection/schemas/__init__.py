"""
Schemas for query strategies and their outputs.
"""

from .base import (
    STRATEGY_KINDS,
    StrategyKind,
    StrategySpec,
    TupleKey,
    TupleIndex,
    SelectionState,
    SelectionRecord,
    IterationMetrics,
    ActiveLearningResult
)

__all__ = [
    'STRATEGY_KINDS',
    'StrategyKind',
    'StrategySpec',
    'TupleKey',
    'TupleIndex',
    'SelectionState',
    'SelectionRecord',
    'IterationMetrics',
    'ActiveLearningResult'
]
