"""
Schemas for crowd label distributions and budget plans.
"""

from .base import (
    Condition,
    EntropySource,
    TABLE_CHECKPOINTS,
    ROUND_BUDGET,
    CrowdDistribution,
    BudgetPlan,
    DrawSnapshot
)

__all__ = [
    'Condition',
    'EntropySource',
    'TABLE_CHECKPOINTS',
    'ROUND_BUDGET',
    'CrowdDistribution',
    'BudgetPlan',
    'DrawSnapshot'
]
