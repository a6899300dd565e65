from typing import Dict, List, Literal, Optional, Tuple
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from alsim.dataset.schemas import Pool
from alsim.core.utils.data import derive_rng

StrategyKind = Literal["random", "tuple_cycle", "tuple_cycle_max_entropy"]
STRATEGY_KINDS: Tuple[str, ...] = ("random", "tuple_cycle", "tuple_cycle_max_entropy")

# (auto_label, subject_id)
TupleKey = Tuple[int, str]

class StrategySpec(BaseModel):
    """Which query strategy to run and its seed"""
    model_config = ConfigDict(frozen=True)

    kind: StrategyKind
    seed: int = 0

class TupleIndex(BaseModel):
    """Unlabeled frame ids grouped by (auto_label, subject), each list sorted by frame_id"""
    entries: Dict[TupleKey, List[str]] = Field(default_factory=dict)

    @classmethod
    def from_pool(cls, pool: Pool) -> 'TupleIndex':
        entries: Dict[TupleKey, List[str]] = {}
        for frame in pool.frames:
            if frame.auto_label is None or frame.frame_id in pool.labeled_ids:
                continue
            entries.setdefault((frame.auto_label, frame.subject_id), []).append(frame.frame_id)
        return cls(entries={key: sorted(ids) for key, ids in entries.items()})

    def __len__(self) -> int:
        return sum(len(ids) for ids in self.entries.values())

class SelectionState(BaseModel):
    """
    Per-experiment selection state: the seed-shuffled cyclic key order (fixed
    for the whole experiment), the position in that cycle and the random stream.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    key_order: List[TupleKey] = Field(default_factory=list)
    cursor: int = 0
    rng: np.random.Generator

    @classmethod
    def start(cls, pool: Pool, spec: StrategySpec) -> 'SelectionState':
        """
        Keys are visited round-robin over auto labels (label order shuffled),
        each label's subjects in shuffled order, so every round of C keys
        visits each auto label once while it still has subjects.
        """
        rng = derive_rng(spec.seed, spec.kind, "tuple_order")
        subjects: Dict[int, List[str]] = {}
        for key in sorted({(f.auto_label, f.subject_id) for f in pool.frames if f.auto_label is not None}):
            subjects.setdefault(key[0], []).append(key[1])
        labels = [int(label) for label in rng.permutation(sorted(subjects))]
        columns = {label: [subjects[label][i] for i in rng.permutation(len(subjects[label]))] for label in labels}
        depth = max((len(column) for column in columns.values()), default=0)
        key_order = [(label, columns[label][k]) for k in range(depth) for label in labels if k < len(columns[label])]
        return cls(
            key_order=key_order,
            cursor=0,
            rng=derive_rng(spec.seed, spec.kind, "selection")
        )

class SelectionRecord(BaseModel):
    """One emitted frame, as logged to selections.csv"""
    iteration: int
    rank: int
    frame_id: str
    tuple_auto_label: Optional[int] = None
    tuple_subject: Optional[str] = None
    entropy: float

class IterationMetrics(BaseModel):
    """Evaluation after one active-learning iteration"""
    iteration: int
    labels_used: int
    accuracy: float
    macro_f1: float
    mean_cross_entropy: float

class ActiveLearningResult(BaseModel):
    strategy: StrategyKind
    metrics: List[IterationMetrics] = Field(default_factory=list)
    selections: List[SelectionRecord] = Field(default_factory=list)
