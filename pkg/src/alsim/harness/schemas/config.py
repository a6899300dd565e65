from typing import List, Literal, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, model_validator

from alsim.dataset.schemas import PoolSchema
from alsim.synth.schemas import SynthConfig
from alsim.classifier.schemas import ClassifierConfig, TargetMode
from alsim.selection.schemas import STRATEGY_KINDS, StrategyKind
from alsim.crowd.schemas import TABLE_CHECKPOINTS, Condition, EntropySource

ExperimentKind = Literal["exp1_selection", "exp2_crowd", "curve_fit"]

# Classifier defaults per experiment when the config leaves `classifier` out
EXP1_CLASSIFIER = ClassifierConfig(epochs=200, batch_size=32, learning_rate=0.01)
EXP2_CLASSIFIER = ClassifierConfig(epochs=200, batch_size=32, learning_rate=0.01)

ALL_MODE_PAIRS: List[Tuple[str, str]] = [
    ("one_hot", "one_hot"), ("soft", "soft"), ("one_hot", "soft"), ("soft", "one_hot")
]

class PoolSourceConfig(BaseModel):
    """Where frames come from: a pool CSV or a synthetic recipe"""
    model_config = ConfigDict(extra='forbid')

    csv: Optional[str] = None
    synth: Optional[SynthConfig] = None
    columns: PoolSchema = Field(default_factory=PoolSchema)

    @model_validator(mode='after')
    def exactly_one(self) -> 'PoolSourceConfig':
        if (self.csv is None) == (self.synth is None):
            raise ValueError("give exactly one of csv or synth")
        return self

class BalancedConfig(BaseModel):
    """Balanced evaluation subset over attributes and true class"""
    model_config = ConfigDict(extra='forbid')

    attributes: List[str] = Field(default_factory=list)
    per_cell: int = Field(ge=0)

class EvalSourceConfig(BaseModel):
    """Evaluation frames for the selection experiment; neither csv nor synth means a held-out subject split"""
    model_config = ConfigDict(extra='forbid')

    csv: Optional[str] = None
    synth: Optional[SynthConfig] = None
    columns: PoolSchema = Field(default_factory=PoolSchema)
    balanced: Optional[BalancedConfig] = None

    @model_validator(mode='after')
    def at_most_one(self) -> 'EvalSourceConfig':
        if self.csv is not None and self.synth is not None:
            raise ValueError("give at most one of csv or synth")
        return self

    @property
    def held_out(self) -> bool:
        return self.csv is None and self.synth is None

class BasePoolConfig(BaseModel):
    """Frames labeled before the first iteration"""
    model_config = ConfigDict(extra='forbid')

    csv: Optional[str] = None
    fraction: Optional[float] = Field(None, gt=0, lt=1)

    @model_validator(mode='after')
    def exactly_one(self) -> 'BasePoolConfig':
        if (self.csv is None) == (self.fraction is None):
            raise ValueError("give exactly one of csv or fraction")
        return self

class ExperimentConfig(BaseModel):
    """One experiment document"""
    model_config = ConfigDict(extra='forbid')

    experiment: ExperimentKind
    pool_source: Optional[PoolSourceConfig] = None
    eval_source: EvalSourceConfig = Field(default_factory=EvalSourceConfig)

    # selection experiment
    strategies: List[StrategyKind] = Field(default_factory=lambda: list(STRATEGY_KINDS), min_length=1)
    iterations: int = Field(default=10, ge=1)
    batch_size: Optional[int] = Field(default=None, ge=1, description="Defaults to 5 per class")
    base_pool: Optional[BasePoolConfig] = None
    fit: bool = False

    # crowd experiment
    conditions: List[Condition] = Field(default_factory=lambda: ["cycling", "active"], min_length=1)
    mode_pairs: List[Tuple[TargetMode, TargetMode]] = Field(
        default_factory=lambda: list(ALL_MODE_PAIRS), min_length=1
    )
    checkpoints: List[int] = Field(default_factory=lambda: list(TABLE_CHECKPOINTS), min_length=1)
    folds: int = Field(default=3, ge=1)
    train_fraction: float = Field(default=2 / 3, gt=0, lt=1)
    final_epochs: int = Field(default=50, ge=1)
    entropy_source: EntropySource = "drawn"

    # curve fit
    metrics_path: Optional[str] = None
    fit_metric: str = "accuracy"

    classifier: Optional[ClassifierConfig] = None
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    output_dir: str = "results"
    workers: int = Field(default=1, ge=1)

    def resolved(self, class_count: Optional[int] = None) -> 'ExperimentConfig':
        """Copy with every harness default written out"""
        update = {}
        if self.classifier is None:
            update["classifier"] = EXP2_CLASSIFIER if self.experiment == "exp2_crowd" else EXP1_CLASSIFIER
        if self.batch_size is None and class_count is not None:
            update["batch_size"] = 5 * class_count
        return self.model_copy(update=update, deep=True)

class RunSummary(BaseModel):
    """What a run produced"""
    output_dir: str
    files: List[str] = Field(default_factory=list)
    metric_rows: int = 0
