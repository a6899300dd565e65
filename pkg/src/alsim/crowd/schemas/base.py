from typing import Dict, List, Literal, Tuple
from pydantic import BaseModel, Field, field_validator, model_validator

Condition = Literal["cycling", "active"]
EntropySource = Literal["drawn", "reference"]

# Labeled-frame checkpoints reported for the crowd experiment
TABLE_CHECKPOINTS: Tuple[int, ...] = (3, 6, 9, 12, 15, 18, 21, 24, 30, 45, 75)

# Samples per frame spent in one round (3N per round over N frames)
ROUND_BUDGET = 3

class CrowdDistribution(BaseModel):
    """Reference crowd votes for one frame and the labels drawn from them so far"""
    frame_id: str
    counts: Tuple[int, ...] = Field(description="Full reference vote counts")
    drawn: List[int] = Field(default_factory=list, description="Labels sampled so far, per class")

    @model_validator(mode='after')
    def fill_drawn(self) -> 'CrowdDistribution':
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")
        if not self.drawn:
            self.drawn = [0] * len(self.counts)
        if len(self.drawn) != len(self.counts):
            raise ValueError("drawn and counts lengths differ")
        return self

    @property
    def total_drawn(self) -> int:
        return sum(self.drawn)

class BudgetPlan(BaseModel):
    """Samples per frame for one round; totals exactly 3N"""
    per_frame_samples: Dict[str, int]
    total: int

    @field_validator('per_frame_samples')
    @classmethod
    def at_least_one(cls, v):
        if any(k < 1 for k in v.values()):
            raise ValueError("every frame gets at least one sample")
        return v

    @model_validator(mode='after')
    def check_total(self) -> 'BudgetPlan':
        if sum(self.per_frame_samples.values()) != self.total:
            raise ValueError("total differs from the sum of per-frame samples")
        return self

class DrawSnapshot(BaseModel):
    """Drawn counts of every training frame at one checkpoint"""
    checkpoint_index: int = Field(ge=1)
    checkpoint: int
    distributions: List[CrowdDistribution]

    def drawn_by_frame(self) -> Dict[str, Tuple[int, ...]]:
        return {d.frame_id: tuple(d.drawn) for d in self.distributions}
