from typing import List, Mapping, Optional, Sequence, Union

import numpy as np

from alsim.dataset.schemas import Frame, Pool, FoldSpec, MetricRecord
from alsim.dataset.services import fold_pools
from alsim.classifier.schemas import ClassifierConfig, ClassifierModel, TargetSet, TargetMode
from alsim.classifier.services import init_model, train, predict_proba, cross_entropy_rows
from alsim.classifier.exceptions import EvaluationError
from alsim.crowd.schemas import (
    Condition, EntropySource, ROUND_BUDGET, CrowdDistribution, BudgetPlan, DrawSnapshot
)
from alsim.crowd.exceptions import (
    EmptyDistributionError, BudgetError, CrowdScheduleError, MissingCrowdCountsError
)
from alsim.selection.services import entropy
from alsim.core.logging import get_logger, log_event
from alsim.core.utils.data import as_generator, derive_rng

logger = get_logger(__name__)

Seed = Union[int, np.random.Generator]

# (share of N in percent, samples per frame), highest-entropy tier first
ENTROPY_TIERS = ((10, 7), (15, 5), (40, 3))

def sample_labels(dist: CrowdDistribution, k: int, seed: Seed) -> np.ndarray:
    """
    Draw k labels with replacement from counts / sum(counts) and add them to
    dist.drawn.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    counts = np.asarray(dist.counts, dtype=float)
    if counts.sum() <= 0:
        raise EmptyDistributionError(f"frame {dist.frame_id!r} has no reference votes", frame_id=dist.frame_id)
    if k == 0:
        return np.zeros(0, dtype=int)
    draws = as_generator(seed).choice(len(counts), size=k, p=counts / counts.sum())
    dist.drawn = (np.asarray(dist.drawn) + np.bincount(draws, minlength=len(counts))).tolist()
    return draws

def crowd_entropy(drawn_or_counts: Sequence[int]) -> float:
    """Entropy (nats) of a vote vector after normalization"""
    v = np.asarray(drawn_or_counts, dtype=float)
    total = v.sum()
    if total <= 0:
        raise EmptyDistributionError("vote vector sums to zero")
    return entropy(v / total)

@log_event(__name__)
def allocate_budget(entropies: Mapping[str, float], n_frames: int) -> BudgetPlan:
    """
    Spread 3N samples over N frames by entropy tier.
    
    Frames sorted by decreasing entropy (ties by lowest frame_id) get 7 samples
    for the first floor(0.10 N), 5 for the next floor(0.15 N), 3 for the next
    floor(0.40 N) and 1 for the rest. Any shortfall from the floors is granted
    one sample at a time in descending-entropy order (wrapping if needed);
    an excess would be removed in ascending order.
    """
    if n_frames == 0:
        raise BudgetError("cannot allocate a budget over zero frames")
    if len(entropies) != n_frames:
        raise BudgetError("entropies must cover exactly n_frames frames",
                          details={"n_frames": n_frames, "entropies": len(entropies)})

    order = sorted(entropies, key=lambda fid: (-entropies[fid], fid))
    samples: List[int] = []
    for percent, per_frame in ENTROPY_TIERS:
        samples += [per_frame] * (n_frames * percent // 100)
    samples += [1] * (n_frames - len(samples))

    target = ROUND_BUDGET * n_frames
    total = sum(samples)
    i = 0
    while total < target:
        samples[i % n_frames] += 1
        total += 1
        i += 1
    i = 0
    while total > target:
        j = n_frames - 1 - (i % n_frames)
        if samples[j] > 1:
            samples[j] -= 1
            total -= 1
        i += 1

    return BudgetPlan(per_frame_samples=dict(zip(order, samples)), total=total)

def _majority(votes: np.ndarray, rng: np.random.Generator) -> int:
    winners = np.flatnonzero(votes == votes.max())
    if len(winners) == 1:
        return int(winners[0])
    return int(rng.choice(winners))

def build_targets(dists: Sequence[CrowdDistribution], mode: TargetMode, seed: Seed) -> TargetSet:
    """
    Targets from drawn labels: majority vote with uniform random tie-breaks
    (one_hot) or the normalized drawn vector (soft).
    """
    rng = as_generator(seed)
    rows = []
    for dist in dists:
        if dist.total_drawn < 1:
            raise EmptyDistributionError(f"frame {dist.frame_id!r} has no drawn labels", frame_id=dist.frame_id)
        drawn = np.asarray(dist.drawn, dtype=float)
        if mode == "one_hot":
            row = np.zeros_like(drawn)
            row[_majority(drawn, rng)] = 1.0
        else:
            row = drawn / drawn.sum()
        rows.append(row)
    return TargetSet(mode=mode, targets=np.array(rows).reshape(len(rows), -1))

def reference_targets(frames: Sequence[Frame], mode: TargetMode, seed: Seed) -> TargetSet:
    """Targets from the full reference counts, used to score held-out frames"""
    dists = [CrowdDistribution(frame_id=f.frame_id, counts=f.crowd_counts, drawn=list(f.crowd_counts))
             for f in frames]
    return build_targets(dists, mode, seed)

def check_schedule(schedule: Sequence[int]) -> None:
    if not schedule:
        raise CrowdScheduleError("schedule is empty", schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise CrowdScheduleError("schedule must be strictly increasing", schedule)
    if any(s <= 0 or s % ROUND_BUDGET for s in schedule):
        raise CrowdScheduleError(f"checkpoints must be positive multiples of {ROUND_BUDGET}", schedule)

def _require_counts(pool: Pool) -> None:
    missing = [f.frame_id for f in pool.frames if f.crowd_counts is None]
    if missing or not pool.frames:
        raise MissingCrowdCountsError("every frame needs reference crowd counts", frame_ids=missing[:5])

def fold_draw_seed(seed: int, fold_index: int, condition: Condition) -> np.random.Generator:
    """Draw stream for one (seed, fold, condition); shared by every mode pair"""
    return derive_rng(seed, "draws", fold_index, condition)

def simulate_draws(
    pool: Pool,
    schedule: Sequence[int],
    condition: Condition,
    seed: Seed,
    entropy_source: EntropySource = "drawn"
) -> List[DrawSnapshot]:
    """
    Accumulate crowd draws over the training frames and snapshot them at
    every checkpoint.
    
    A checkpoint s means s * N labels drawn in total, spent in rounds of 3N.
    cycling draws 3 labels per frame each round. active draws 1 label per frame,
    ranks frames by crowd entropy (of the drawn labels, or of the reference
    counts) and draws the rest of an allocate_budget plan.
    """
    _require_counts(pool)
    check_schedule(schedule)
    rng = as_generator(seed)
    dists = [CrowdDistribution(frame_id=f.frame_id, counts=f.crowd_counts) for f in pool.frames]
    n = len(dists)

    snapshots = []
    spent = 0
    for index, checkpoint in enumerate(schedule, start=1):
        while spent < checkpoint:
            if condition == "cycling":
                for dist in dists:
                    sample_labels(dist, ROUND_BUDGET, rng)
            else:
                for dist in dists:
                    sample_labels(dist, 1, rng)
                source = {
                    d.frame_id: crowd_entropy(d.drawn if entropy_source == "drawn" else d.counts)
                    for d in dists
                }
                plan = allocate_budget(source, n)
                for dist in dists:
                    sample_labels(dist, plan.per_frame_samples[dist.frame_id] - 1, rng)
            spent += ROUND_BUDGET
        snapshots.append(DrawSnapshot(
            checkpoint_index=index,
            checkpoint=checkpoint,
            distributions=[d.model_copy(deep=True) for d in dists]
        ))
    return snapshots

def _loss_statistics(losses: List[float]) -> tuple:
    values = np.asarray(losses, dtype=float)
    return float(values.mean()), float(values.std())

@log_event(__name__)
def run_crowd_experiment(
    pool: Pool,
    folds: Sequence[FoldSpec],
    schedule: Sequence[int],
    condition: Condition,
    train_mode: TargetMode,
    test_mode: TargetMode,
    train_params: Optional[ClassifierConfig] = None,
    seed: int = 0,
    entropy_source: EntropySource = "drawn",
    final_epochs: int = 50
) -> List[MetricRecord]:
    """
    Crowd-label active learning over subject-disjoint folds.
    
    For every fold and checkpoint the classifier is trained from scratch on
    targets built from the labels drawn so far and scored on the fold's test
    frames after every epoch; the record holds the mean and population std of
    the test cross-entropy over the last final_epochs epochs.
    
    Random streams depend on (seed, fold, checkpoint) and, for draws, the
    condition, never on the target modes, so mode cells see identical draws.
    """
    _require_counts(pool)
    check_schedule(schedule)
    train_params = train_params or ClassifierConfig(epochs=200)
    if train_params.epochs < 1:
        raise ValueError("the crowd experiment needs at least one training epoch")
    window = min(final_epochs, train_params.epochs)

    records: List[MetricRecord] = []
    for fold in folds:
        train_pool, test_pool = fold_pools(pool, fold)
        if not train_pool.frames or not test_pool.frames:
            raise EvaluationError("fold has an empty side", details={"fold": fold.fold_index})
        X_train = train_pool.feature_matrix()
        X_test = test_pool.feature_matrix()
        test_targets = reference_targets(test_pool.frames, test_mode,
                                         derive_rng(seed, "test_targets", fold.fold_index)).targets

        snapshots = simulate_draws(train_pool, schedule, condition,
                                   fold_draw_seed(seed, fold.fold_index, condition), entropy_source)
        for snapshot in snapshots:
            cell = (fold.fold_index, snapshot.checkpoint)
            targets = build_targets(snapshot.distributions, train_mode, derive_rng(seed, "train_targets", *cell))
            losses: List[float] = []

            def record_test_loss(epoch: int, model: ClassifierModel) -> None:
                if epoch >= train_params.epochs - window:
                    losses.append(float(cross_entropy_rows(predict_proba(model, X_test), test_targets).mean()))

            model = init_model(pool.class_count, pool.feature_dim, train_params, derive_rng(seed, "init", *cell))
            train(model, X_train, targets, train_params.epochs, train_params.batch_size,
                  derive_rng(seed, "train", *cell), epoch_callback=record_test_loss)
            mean, std = _loss_statistics(losses)
            records.append(MetricRecord(
                iteration=snapshot.checkpoint_index,
                labels_used=snapshot.checkpoint,
                strategy=condition,
                fold=fold.fold_index,
                metric="cross_entropy",
                mean=mean,
                std=std,
                train_mode=train_mode,
                test_mode=test_mode
            ))
        logger.info("Fold %d %s %s/%s: %d checkpoints done",
                    fold.fold_index, condition, train_mode, test_mode, len(snapshots))
    return records
