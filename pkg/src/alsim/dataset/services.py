from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from alsim.dataset.schemas import Pool, FoldSpec, BalancedSubset
from alsim.dataset.exceptions import FoldSplitError, BalancedSubsetError
from alsim.core.logging import get_logger, log_event
from alsim.core.utils.data import derive_rng

logger = get_logger(__name__)

@log_event(__name__)
def split_folds(pool: Pool, n_folds: int, train_fraction: float, seed: int) -> List[FoldSpec]:
    """
    Split the pool's subjects (not frames) into train/test folds.
    
    Every fold is an independent seed-derived shuffle of the sorted subject list;
    the first round(train_fraction * S) subjects train, the rest test. Both sides
    always keep at least one subject.
    
    Args:
        pool: Pool whose subjects are split
        n_folds: Number of folds (>= 1)
        train_fraction: Share of subjects in the training side, in (0, 1)
        seed: Seed for the per-fold shuffles
        
    Returns:
        List of subject-disjoint FoldSpec
    """
    if n_folds < 1:
        raise FoldSplitError("n_folds must be at least 1", details={"n_folds": n_folds})
    if not 0 < train_fraction < 1:
        raise FoldSplitError("train_fraction must lie strictly between 0 and 1",
                             details={"train_fraction": train_fraction})
    subjects = pool.subject_ids
    if len(subjects) < 2:
        raise FoldSplitError("at least 2 distinct subjects are needed",
                             details={"subjects": len(subjects)})

    n_train = min(max(int(round(train_fraction * len(subjects))), 1), len(subjects) - 1)
    folds = []
    for fold_index in range(n_folds):
        order = derive_rng(seed, "fold", fold_index).permutation(len(subjects))
        shuffled = [subjects[i] for i in order]
        folds.append(FoldSpec(
            fold_index=fold_index,
            train_subjects=frozenset(shuffled[:n_train]),
            test_subjects=frozenset(shuffled[n_train:])
        ))
    logger.info("Split %d subjects into %d folds (%d train / %d test)",
                len(subjects), n_folds, n_train, len(subjects) - n_train)
    return folds

def fold_pools(pool: Pool, fold: FoldSpec) -> Tuple[Pool, Pool]:
    """Train and test sub-pools of a fold"""
    return pool.subset(fold.train_subjects), pool.subset(fold.test_subjects)

@log_event(__name__)
def balanced_subset(pool: Pool, attributes: Sequence[str], per_cell: int, seed: int) -> BalancedSubset:
    """
    Draw a subset balanced over (attribute values..., true class) cells.
    
    Cells are the combinations present in the pool. Cells with more than per_cell
    frames are sampled uniformly without replacement; smaller cells are taken whole
    and their shortfall is reported. Frames keep their pool order.
    """
    if per_cell < 0:
        raise ValueError("per_cell must be nonnegative")

    cells: Dict[tuple, List[int]] = defaultdict(list)
    for i, frame in enumerate(pool.frames):
        if frame.true_label is None:
            raise BalancedSubsetError(f"frame {frame.frame_id!r} has no true_label", frame_id=frame.frame_id)
        values = []
        for name in attributes:
            if name not in frame.attributes:
                raise BalancedSubsetError(
                    f"frame {frame.frame_id!r} lacks attribute {name!r}",
                    frame_id=frame.frame_id,
                    details={"attribute": name}
                )
            values.append(frame.attributes[name])
        cells[tuple(values) + (frame.true_label,)].append(i)

    rng = np.random.default_rng(seed)
    chosen: List[int] = []
    shortfalls: Dict[tuple, int] = {}
    for cell in sorted(cells):
        members = cells[cell]
        if len(members) <= per_cell:
            chosen.extend(members)
            if len(members) < per_cell:
                shortfalls[cell] = per_cell - len(members)
        else:
            picks = rng.choice(len(members), size=per_cell, replace=False)
            chosen.extend(members[j] for j in picks)

    if shortfalls:
        logger.warning("Balanced subset short by %d frames across %d cells",
                       sum(shortfalls.values()), len(shortfalls))
    subset = pool.from_frames(pool.frames[i] for i in sorted(chosen))
    return BalancedSubset(pool=subset, shortfalls=shortfalls)
