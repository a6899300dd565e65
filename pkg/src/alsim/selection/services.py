from typing import Dict, List, Optional, Sequence

import numpy as np

from alsim.dataset.schemas import Frame, Pool
from alsim.classifier.schemas import ClassifierConfig, ClassifierModel, TargetSet
from alsim.classifier.services import init_model, train, evaluate, predict_proba
from alsim.selection.schemas import (
    StrategySpec, TupleIndex, SelectionState, SelectionRecord,
    IterationMetrics, ActiveLearningResult
)
from alsim.selection.exceptions import SelectionError, NotNormalizedError, MissingRevealLabelError
from alsim.shared.utils import one_hot, row_entropy
from alsim.core.logging import get_logger, log_event
from alsim.core.utils.data import derive_rng

logger = get_logger(__name__)

def entropy(probabilities: Sequence[float]) -> float:
    """Shannon entropy in nats, -sum p ln p with 0 ln 0 = 0."""
    p = np.asarray(probabilities, dtype=float)
    if (p < 0).any():
        raise SelectionError("probabilities must be nonnegative", error_code="negative_probability")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-6:
        raise NotNormalizedError(total)
    return float(row_entropy(p)[0])

def _frame_entropies(pool: Pool, model: ClassifierModel, frame_ids: List[str]) -> Dict[str, float]:
    if not frame_ids:
        return {}
    H = row_entropy(predict_proba(model, pool.feature_matrix(frame_ids)))
    return dict(zip(frame_ids, H.tolist()))

def select_batch(
    pool: Pool,
    model: ClassifierModel,
    spec: StrategySpec,
    batch_size: int,
    state: Optional[SelectionState] = None,
    iteration: int = 0
) -> List[SelectionRecord]:
    """
    Choose up to batch_size unlabeled frames and describe each choice.
    
    Only auto_label and subject_id are consulted, never true_label. Every
    record carries the entropy of its frame under `model`.
    """
    if batch_size < 1:
        raise SelectionError("batch_size must be at least 1", error_code="batch_size",
                             details={"batch_size": batch_size})
    state = state or SelectionState.start(pool, spec)
    unlabeled = sorted(pool.unlabeled_ids)
    if not unlabeled:
        return []

    if spec.kind == "random":
        candidates = unlabeled
    else:
        index = TupleIndex.from_pool(pool)
        candidates = sorted(fid for ids in index.entries.values() for fid in ids)
    entropies = _frame_entropies(pool, model, candidates)

    def record(rank: int, frame_id: str) -> SelectionRecord:
        frame = pool.get(frame_id)
        return SelectionRecord(
            iteration=iteration, rank=rank, frame_id=frame_id,
            tuple_auto_label=frame.auto_label, tuple_subject=frame.subject_id,
            entropy=entropies[frame_id]
        )

    if spec.kind == "random":
        picks = state.rng.choice(len(unlabeled), size=min(batch_size, len(unlabeled)), replace=False)
        return [record(rank, unlabeled[j]) for rank, j in enumerate(picks)]

    remaining = {key: list(ids) for key, ids in index.entries.items()}
    left = len(index)
    records: List[SelectionRecord] = []
    while len(records) < batch_size and left > 0:
        key = state.key_order[state.cursor]
        state.cursor = (state.cursor + 1) % len(state.key_order)
        ids = remaining.get(key)
        if not ids:
            continue
        if spec.kind == "tuple_cycle":
            j = int(state.rng.integers(len(ids)))
        else:
            # ids are sorted, so argmax's first hit is the lowest frame_id among ties
            j = int(np.argmax([entropies[fid] for fid in ids]))
        records.append(record(len(records), ids.pop(j)))
        left -= 1
    return records

def next_batch(
    pool: Pool,
    model: ClassifierModel,
    spec: StrategySpec,
    batch_size: int,
    state: Optional[SelectionState] = None
) -> List[str]:
    """
    Next frame ids to label, in emission order.
    
    random draws uniformly without replacement. tuple_cycle walks the
    (auto_label, subject) keys in a seed-shuffled cyclic order and takes a random
    remaining frame per key; tuple_cycle_max_entropy takes the frame of highest
    predictive entropy instead. Exhausted keys are skipped. Pass the same state
    across calls to keep one key order and resume the cycle.
    """
    return [r.frame_id for r in select_batch(pool, model, spec, batch_size, state)]

def reveal_targets(frames: Sequence[Frame], class_count: int) -> TargetSet:
    """One-hot targets from the true labels of newly labeled frames"""
    for frame in frames:
        if frame.true_label is None:
            raise MissingRevealLabelError(frame.frame_id)
    return TargetSet(mode="one_hot", targets=one_hot(np.array([f.true_label for f in frames]), class_count))

def fit_from_scratch(
    frames: Sequence[Frame],
    class_count: int,
    feature_dim: int,
    train_params: ClassifierConfig,
    seed: int,
    step: int
) -> ClassifierModel:
    """Fresh initialization followed by training on all given frames"""
    model = init_model(class_count, feature_dim, train_params, derive_rng(seed, "init", step))
    if not frames:
        return model
    return train(
        model, frames, reveal_targets(frames, class_count),
        epochs=train_params.epochs,
        batch_size=train_params.batch_size,
        seed=derive_rng(seed, "train", step)
    )

@log_event(__name__)
def run_active_learning(
    pool: Pool,
    spec: StrategySpec,
    iterations: int,
    batch_size: int,
    eval_set: Sequence[Frame],
    train_params: Optional[ClassifierConfig] = None,
    base_frames: Sequence[Frame] = ()
) -> ActiveLearningResult:
    """
    Simulate pool-based active learning with one strategy.
    
    Each iteration selects a batch with the current model, reveals the true
    labels, retrains from a fresh initialization on every labeled frame (plus
    base frames and frames already labeled in the pool) and evaluates on
    eval_set. labels_used counts frames chosen by the strategy.
    
    Args:
        pool: Selection pool; its labeled partition is treated as a base pool
        spec: Strategy and seed
        iterations: Number of select/train/evaluate rounds
        batch_size: Frames selected per round
        eval_set: Frames with true labels for evaluation
        train_params: Classifier settings
        base_frames: Extra labeled frames that are never selectable
        
    Returns:
        Per-iteration metrics and the selection log
    """
    if iterations < 1:
        raise SelectionError("iterations must be at least 1", error_code="iterations")
    if not eval_set:
        raise SelectionError("evaluation set is empty", error_code="empty_eval_set")
    initial_unlabeled = len(pool.unlabeled_ids)
    if initial_unlabeled == 0:
        raise SelectionError("pool has no unlabeled frames", error_code="empty_pool")
    train_params = train_params or ClassifierConfig()
    base_frames = list(base_frames)

    state = SelectionState.start(pool, spec)
    model = fit_from_scratch(base_frames + pool.labeled_frames(), pool.class_count,
                             pool.feature_dim, train_params, spec.seed, 0)
    result = ActiveLearningResult(strategy=spec.kind)

    for iteration in range(1, iterations + 1):
        records = select_batch(pool, model, spec, batch_size, state, iteration)
        if records:
            pool = pool.with_labeled(r.frame_id for r in records)
        result.selections.extend(records)

        model = fit_from_scratch(base_frames + pool.labeled_frames(), pool.class_count,
                                 pool.feature_dim, train_params, spec.seed, iteration)
        metrics = evaluate(model, eval_set, "one_hot")
        # min(iteration * batch_size, initial_unlabeled) unless tuple keys run dry first
        labels_used = len(result.selections)
        result.metrics.append(IterationMetrics(
            iteration=iteration,
            labels_used=labels_used,
            accuracy=metrics.accuracy,
            macro_f1=metrics.macro_f1,
            mean_cross_entropy=metrics.mean_cross_entropy
        ))
        logger.info("%s iteration %d: %d labels, accuracy %.4f",
                    spec.kind, iteration, labels_used, metrics.accuracy)
    return result
