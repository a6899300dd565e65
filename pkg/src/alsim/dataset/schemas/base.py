from typing import Optional, List, Tuple, Dict, FrozenSet, Iterable, Any
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

DEFAULT_CLASS_COUNT = 7

class Frame(BaseModel):
    """One pool item: a feature vector plus its labels and metadata"""
    model_config = ConfigDict(frozen=True)

    frame_id: str = Field(description="Opaque frame identifier")
    subject_id: str = Field(description="Identifier of the person shown in the frame")
    features: Tuple[float, ...] = Field(description="Feature vector of length D")
    auto_label: Optional[int] = Field(None, ge=0, description="Noisy metadata label recorded at collection time")
    true_label: Optional[int] = Field(None, ge=0, description="Ground-truth class index")
    crowd_counts: Optional[Tuple[int, ...]] = Field(None, description="Crowd votes per class")
    attributes: Dict[str, str] = Field(default_factory=dict, description="Categorical attributes used for balanced subsets")

    @field_validator('crowd_counts')
    @classmethod
    def check_crowd_counts(cls, v):
        if v is None:
            return v
        if any(c < 0 for c in v):
            raise ValueError("crowd counts must be nonnegative")
        if sum(v) < 1:
            raise ValueError("crowd counts must sum to at least 1")
        return v

    @field_validator('attributes')
    @classmethod
    def drop_empty_attributes(cls, v):
        # an empty value and a missing attribute are the same thing
        return {name: value for name, value in v.items() if value != ""}

class Pool(BaseModel):
    """Indexed, immutable collection of frames with a labeled partition"""
    model_config = ConfigDict(frozen=True)

    frames: Tuple[Frame, ...] = Field(default_factory=tuple)
    class_count: int = Field(DEFAULT_CLASS_COUNT, ge=1, description="Number of classes C")
    feature_dim: int = Field(0, ge=0, description="Feature dimension D")
    labeled_ids: FrozenSet[str] = Field(default_factory=frozenset)
    class_names: Optional[Tuple[str, ...]] = None

    _index: Dict[str, int] = PrivateAttr(default_factory=dict)

    @model_validator(mode='before')
    @classmethod
    def infer_feature_dim(cls, data: Any) -> Any:
        if isinstance(data, dict) and 'feature_dim' not in data and data.get('frames'):
            first = data['frames'][0]
            features = first.features if isinstance(first, Frame) else first['features']
            data = {**data, 'feature_dim': len(features)}
        return data

    @model_validator(mode='after')
    def check_consistency(self) -> 'Pool':
        seen = set()
        for frame in self.frames:
            if frame.frame_id in seen:
                raise ValueError(f"duplicate frame_id {frame.frame_id!r}")
            seen.add(frame.frame_id)
            if len(frame.features) != self.feature_dim:
                raise ValueError(
                    f"frame {frame.frame_id!r} has {len(frame.features)} features, expected {self.feature_dim}"
                )
            for name, label in (('auto_label', frame.auto_label), ('true_label', frame.true_label)):
                if label is not None and label >= self.class_count:
                    raise ValueError(f"frame {frame.frame_id!r} {name}={label} outside [0, {self.class_count})")
            if frame.crowd_counts is not None and len(frame.crowd_counts) != self.class_count:
                raise ValueError(f"frame {frame.frame_id!r} crowd_counts length differs from class_count")
        missing = self.labeled_ids - seen
        if missing:
            raise ValueError(f"labeled_ids not in pool: {sorted(missing)[:5]}")
        if self.class_names is not None and len(self.class_names) != self.class_count:
            raise ValueError("class_names length differs from class_count")
        return self

    def model_post_init(self, __context: Any) -> None:
        self._index = {frame.frame_id: i for i, frame in enumerate(self.frames)}

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def frame_ids(self) -> List[str]:
        return [frame.frame_id for frame in self.frames]

    @property
    def unlabeled_ids(self) -> List[str]:
        """Unlabeled frame ids in pool order"""
        return [frame.frame_id for frame in self.frames if frame.frame_id not in self.labeled_ids]

    @property
    def subject_ids(self) -> List[str]:
        return sorted({frame.subject_id for frame in self.frames})

    @property
    def has_crowd_counts(self) -> bool:
        return bool(self.frames) and all(frame.crowd_counts is not None for frame in self.frames)

    def get(self, frame_id: str) -> Frame:
        return self.frames[self._index[frame_id]]

    def labeled_frames(self) -> List[Frame]:
        return [frame for frame in self.frames if frame.frame_id in self.labeled_ids]

    def feature_matrix(self, frame_ids: Optional[Iterable[str]] = None) -> np.ndarray:
        """Stack features of the given frames (all frames by default) into an (n, D) array"""
        frames = self.frames if frame_ids is None else [self.get(fid) for fid in frame_ids]
        if not frames:
            return np.zeros((0, self.feature_dim))
        return np.asarray([frame.features for frame in frames], dtype=float)

    def with_labeled(self, frame_ids: Iterable[str]) -> 'Pool':
        """Copy of the pool with additional frames moved to the labeled partition"""
        ids = frozenset(frame_ids)
        unknown = ids - set(self._index)
        if unknown:
            raise ValueError(f"unknown frame ids: {sorted(unknown)[:5]}")
        return self.model_copy(update={'labeled_ids': self.labeled_ids | ids})

    def subset(self, subject_ids: Iterable[str]) -> 'Pool':
        """Sub-pool holding only the frames of the given subjects"""
        keep = set(subject_ids)
        return self.from_frames([f for f in self.frames if f.subject_id in keep])

    def from_frames(self, frames: Iterable[Frame]) -> 'Pool':
        """New pool over some of this pool's frames, keeping C, D, names and labels"""
        frames = tuple(frames)
        ids = {f.frame_id for f in frames}
        return Pool(
            frames=frames,
            class_count=self.class_count,
            feature_dim=self.feature_dim,
            labeled_ids=self.labeled_ids & ids,
            class_names=self.class_names
        )

class FoldSpec(BaseModel):
    """One subject-disjoint train/test partition"""
    model_config = ConfigDict(frozen=True)

    fold_index: int = Field(ge=0)
    train_subjects: FrozenSet[str]
    test_subjects: FrozenSet[str]

    @model_validator(mode='after')
    def check_disjoint(self) -> 'FoldSpec':
        overlap = self.train_subjects & self.test_subjects
        if overlap:
            raise ValueError(f"subjects in both train and test: {sorted(overlap)}")
        return self

class PoolSchema(BaseModel):
    """Column mapping for pool CSV files"""
    model_config = ConfigDict(extra='forbid')

    frame_id_column: str = "frame_id"
    subject_id_column: str = "subject_id"
    auto_label_column: str = "auto_label"
    true_label_column: str = "true_label"
    feature_prefix: str = "f_"
    count_prefix: str = "count_"
    attribute_prefix: str = "attr:"
    labeled_column: str = "labeled"
    class_count: Optional[int] = Field(None, ge=1, description="Overrides the class count inferred from count columns")
    class_names: Optional[List[str]] = None

METRIC_CORE_COLUMNS = ["iteration", "labels_used", "strategy", "fold", "metric", "mean", "std"]
METRIC_EXTRA_COLUMNS = ["seed", "train_mode", "test_mode"]

class MetricRecord(BaseModel):
    """One row of metrics.csv"""
    iteration: int = Field(ge=0)
    labels_used: int = Field(ge=0)
    strategy: str
    fold: int = 0
    metric: str
    mean: float
    std: float = 0.0
    seed: Optional[int] = None
    train_mode: Optional[str] = None
    test_mode: Optional[str] = None

    def sort_key(self) -> tuple:
        return (
            self.iteration, self.strategy, self.fold,
            -1 if self.seed is None else self.seed,
            self.train_mode or "", self.test_mode or "", self.metric
        )

class BalancedSubset(BaseModel):
    """Result of balanced_subset: the sub-pool and the per-cell shortfall"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    pool: Pool
    shortfalls: Dict[Tuple[Any, ...], int] = Field(
        default_factory=dict,
        description="Cells holding fewer than per_cell frames, mapped to the number of missing frames"
    )

    @property
    def total_shortfall(self) -> int:
        return sum(self.shortfalls.values())
