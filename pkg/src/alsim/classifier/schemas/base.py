from typing import Dict, List, Literal, Optional
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TargetMode = Literal["one_hot", "soft"]

class ClassifierConfig(BaseModel):
    """Architecture and training hyperparameters"""
    model_config = ConfigDict(extra='forbid')

    hidden_units: int = Field(default=0, ge=0, description="0 means linear softmax")
    epochs: int = Field(default=50, ge=0)
    batch_size: int = Field(default=32, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)
    jitter_std: float = Field(default=0.0, ge=0, description="Gaussian feature jitter applied per batch")

class AdamState(BaseModel):
    """First/second moment accumulators and the step counter"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    m: Dict[str, np.ndarray] = Field(default_factory=dict)
    v: Dict[str, np.ndarray] = Field(default_factory=dict)
    t: int = 0

class ClassifierModel(BaseModel):
    """Softmax classifier weights with optional tanh hidden layer"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    class_count: int = Field(ge=1)
    feature_dim: int = Field(ge=0)
    hidden_units: int = Field(default=0, ge=0)
    params: Dict[str, np.ndarray]
    adam: AdamState = Field(default_factory=AdamState)
    config: ClassifierConfig = Field(default_factory=ClassifierConfig)
    epoch_losses: List[float] = Field(default_factory=list, description="Mean training loss per epoch")

    @model_validator(mode='after')
    def check_shapes(self) -> 'ClassifierModel':
        expected = self.param_shapes(self.feature_dim, self.class_count, self.hidden_units)
        if set(self.params) != set(expected):
            raise ValueError(f"expected parameters {sorted(expected)}, got {sorted(self.params)}")
        for name, shape in expected.items():
            if self.params[name].shape != shape:
                raise ValueError(f"parameter {name} has shape {self.params[name].shape}, expected {shape}")
        for moments in (self.adam.m, self.adam.v):
            for name, value in moments.items():
                if value.shape != self.params[name].shape:
                    raise ValueError(f"Adam moment for {name} does not match its parameter")
        return self

    @staticmethod
    def param_shapes(feature_dim: int, class_count: int, hidden_units: int) -> Dict[str, tuple]:
        if hidden_units == 0:
            return {"W": (feature_dim, class_count), "b": (class_count,)}
        return {
            "W1": (feature_dim, hidden_units), "b1": (hidden_units,),
            "W2": (hidden_units, class_count), "b2": (class_count,)
        }

    def copy(self) -> 'ClassifierModel':
        return self.model_copy(deep=True)

    def same_weights(self, other: 'ClassifierModel') -> bool:
        """Bit-for-bit parameter equality"""
        return set(self.params) == set(other.params) and all(
            np.array_equal(self.params[k], other.params[k]) for k in self.params
        )

class TargetSet(BaseModel):
    """Training or evaluation targets, one probability row per frame"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mode: TargetMode
    targets: np.ndarray

    @field_validator('targets')
    @classmethod
    def check_matrix(cls, v):
        v = np.asarray(v, dtype=float)
        if v.ndim != 2:
            raise ValueError("targets must be a 2-D matrix")
        return v

    @model_validator(mode='after')
    def check_rows(self) -> 'TargetSet':
        t = self.targets
        if t.size and (t < 0).any():
            raise ValueError("targets must be nonnegative")
        if t.size and not np.allclose(t.sum(axis=1), 1.0, atol=1e-9, rtol=0):
            raise ValueError("target rows must sum to 1")
        if self.mode == "one_hot" and t.size:
            if not (np.isin(t, (0.0, 1.0)).all() and (t == 1.0).sum(axis=1).tolist() == [1] * len(t)):
                raise ValueError("one_hot rows must contain exactly one 1")
        return self

    def __len__(self) -> int:
        return self.targets.shape[0]

    @property
    def labels(self) -> np.ndarray:
        return self.targets.argmax(axis=1)

class EvaluationMetrics(BaseModel):
    """Result of evaluate"""
    accuracy: Optional[float] = None
    macro_f1: Optional[float] = None
    mean_cross_entropy: float
