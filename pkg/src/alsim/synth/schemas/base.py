from typing import Optional, List
from pydantic import BaseModel, ConfigDict, Field, model_validator

class SynthConfig(BaseModel):
    """Recipe for a synthetic Gaussian-cluster pool"""
    model_config = ConfigDict(extra='forbid')

    class_count: int = Field(default=7, ge=2)
    feature_dim: int = Field(default=10, ge=1)
    frames_per_class: int = Field(default=200, ge=1)
    subjects: int = Field(default=20, ge=1)
    cluster_separation: float = Field(default=3.0, ge=0, description="Distance between any two class means")
    within_class_std: float = Field(default=1.0, gt=0)
    auto_label_noise: float = Field(default=0.2, ge=0, le=1, description="Probability the auto_label is flipped")
    crowd_annotators: int = Field(default=0, ge=0)
    crowd_confusion: float = Field(default=0.2, ge=0, le=1, description="Probability an annotator votes for another class")
    class_confusion: Optional[List[float]] = Field(
        default=None,
        description="Per-class confusion overriding crowd_confusion"
    )
    attribute_groups: int = Field(
        default=0, ge=0,
        description="When > 0, subjects get a 'group' attribute cycling through this many values"
    )
    seed: int = 0

    @model_validator(mode='after')
    def check_shapes(self) -> 'SynthConfig':
        if self.feature_dim < self.class_count:
            raise ValueError("feature_dim must be at least class_count so class means sit on distinct basis vectors")
        if self.class_confusion is not None:
            if len(self.class_confusion) != self.class_count:
                raise ValueError("class_confusion needs one entry per class")
            if any(not 0 <= p <= 1 for p in self.class_confusion):
                raise ValueError("class_confusion entries must lie in [0, 1]")
        return self

    @property
    def frame_count(self) -> int:
        return self.class_count * self.frames_per_class

    def confusion_for(self, class_index: int) -> float:
        if self.class_confusion is not None:
            return self.class_confusion[class_index]
        return self.crowd_confusion
