"""
Schemas for experiment configuration and run summaries.
"""

from .config import (
    ExperimentKind,
    PoolSourceConfig,
    BalancedConfig,
    EvalSourceConfig,
    BasePoolConfig,
    ExperimentConfig,
    RunSummary
)

__all__ = [
    'ExperimentKind',
    'PoolSourceConfig',
    'BalancedConfig',
    'EvalSourceConfig',
    'BasePoolConfig',
    'ExperimentConfig',
    'RunSummary'
]
