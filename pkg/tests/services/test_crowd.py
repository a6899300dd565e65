import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alsim.crowd.schemas import CrowdDistribution
from alsim.crowd.services import (
    sample_labels, crowd_entropy, allocate_budget, build_targets, reference_targets,
    check_schedule, simulate_draws, run_crowd_experiment
)
from alsim.crowd.exceptions import (
    EmptyDistributionError, BudgetError, CrowdScheduleError, MissingCrowdCountsError
)
from alsim.classifier.schemas import ClassifierConfig
from alsim.dataset.services import split_folds
from alsim.synth.services import generate_pool
from tests.test_cases import LN_2, ENTROPY_60_30_10, BUDGET_TIERS, BUDGET_SIZES, CHECKPOINTS
from tests.utils.utils import make_frame, make_pool, random_pool, small_synth_config

FAST_TRAINING = ClassifierConfig(epochs=4, batch_size=16, learning_rate=0.01)

def _entropies(n: int):
    """Distinct, strictly decreasing entropies keyed by frame id"""
    return {f"f{i:04d}": 2.0 - i / (n + 1) for i in range(n)}

def test_sample_from_degenerate_counts():
    dist = CrowdDistribution(frame_id="a", counts=(0, 100, 0))
    draws = sample_labels(dist, 25, seed=0)
    assert set(draws.tolist()) == {1}
    assert dist.drawn == [0, 25, 0]

def test_sample_zero_labels_changes_nothing():
    dist = CrowdDistribution(frame_id="a", counts=(5, 5))
    sample_labels(dist, 0, seed=0)
    assert dist.drawn == [0, 0]

def test_sample_frequency():
    """Counts (50, 50) and 10,000 draws give class 0 about half the time."""
    dist = CrowdDistribution(frame_id="a", counts=(50, 50))
    draws = sample_labels(dist, 10_000, seed=1)
    assert abs(np.mean(draws == 0) - 0.5) <= 0.015
    assert dist.total_drawn == 10_000

def test_sample_from_empty_counts():
    with pytest.raises(EmptyDistributionError):
        sample_labels(CrowdDistribution(frame_id="a", counts=(0, 0)), 1, seed=0)

@pytest.mark.parametrize("counts,expected", [
    ((100, 0, 0, 0, 0, 0, 0), 0.0),
    ((50, 50), LN_2),
    ((60, 30, 10), ENTROPY_60_30_10),
])
def test_crowd_entropy(counts, expected):
    assert crowd_entropy(counts) == pytest.approx(expected, abs=1e-5)

def test_budget_tiers_for_hundred_frames():
    """N=100: 10 frames get 7, 15 get 5, 40 get 3 and 35 get 1."""
    plan = allocate_budget(_entropies(100), 100)
    samples = [plan.per_frame_samples[f"f{i:04d}"] for i in range(100)]
    sevens, fives, threes, ones = BUDGET_TIERS[100]
    assert samples == [7] * sevens + [5] * fives + [3] * threes + [1] * ones
    assert plan.total == 300

def test_budget_tiers_for_twenty_frames():
    plan = allocate_budget(_entropies(20), 20)
    counts = [list(plan.per_frame_samples.values()).count(k) for k in (7, 5, 3, 1)]
    assert tuple(counts) == BUDGET_TIERS[20]
    assert plan.total == 60

def test_budget_remainder_goes_to_highest_entropy():
    """N=7 floors to 15 samples; the 6 highest-entropy frames get one more each."""
    plan = allocate_budget(_entropies(7), 7)
    assert [plan.per_frame_samples[f"f{i:04d}"] for i in range(7)] == [6, 4, 4, 2, 2, 2, 1]
    assert plan.total == 21

@pytest.mark.parametrize("n", BUDGET_SIZES)
def test_budget_is_exactly_three_per_frame(n):
    plan = allocate_budget(_entropies(n), n)
    assert plan.total == sum(plan.per_frame_samples.values()) == 3 * n
    assert min(plan.per_frame_samples.values()) >= 1

@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=2.0), min_size=1, max_size=300))
def test_budget_conservation(values):
    entropies = {f"f{i:04d}": h for i, h in enumerate(values)}
    plan = allocate_budget(entropies, len(values))
    assert plan.total == 3 * len(values)
    ranked = sorted(entropies, key=lambda fid: (-entropies[fid], fid))
    samples = [plan.per_frame_samples[fid] for fid in ranked]
    assert samples == sorted(samples, reverse=True)

def test_budget_ties_break_by_frame_id():
    plan = allocate_budget({"b": 1.0, "a": 1.0, "c": 1.0}, 3)
    assert plan.per_frame_samples == {"a": 5, "b": 2, "c": 2}

def test_budget_errors():
    with pytest.raises(BudgetError):
        allocate_budget({}, 0)
    with pytest.raises(BudgetError):
        allocate_budget({"a": 1.0}, 2)

def test_one_hot_targets_take_majority():
    targets = build_targets([CrowdDistribution(frame_id="a", counts=(1, 1), drawn=[60, 40])], "one_hot", seed=0)
    np.testing.assert_array_equal(targets.targets, [[1.0, 0.0]])

def test_soft_targets_normalize():
    targets = build_targets([CrowdDistribution(frame_id="a", counts=(1, 1, 1), drawn=[50, 30, 20])], "soft", seed=0)
    np.testing.assert_allclose(targets.targets, [[0.5, 0.3, 0.2]])

def test_majority_ties_break_uniformly():
    """Over 1,000 seeded tie-breaks class 0 wins 500 +- 50 times."""
    dists = [CrowdDistribution(frame_id=f"a{i}", counts=(1, 1), drawn=[50, 50]) for i in range(1000)]
    targets = build_targets(dists, "one_hot", seed=3)
    assert abs(int(targets.targets[:, 0].sum()) - 500) <= 50

def test_targets_need_drawn_labels():
    with pytest.raises(EmptyDistributionError):
        build_targets([CrowdDistribution(frame_id="a", counts=(1, 1))], "soft", seed=0)

def test_reference_targets_use_full_counts():
    frames = [make_frame("a", crowd_counts=(1, 3))]
    np.testing.assert_allclose(reference_targets(frames, "soft", seed=0).targets, [[0.25, 0.75]])

@pytest.mark.parametrize("schedule", [[], [3, 3], [6, 3], [4], [0, 3]])
def test_bad_schedules(schedule):
    with pytest.raises(CrowdScheduleError):
        check_schedule(schedule)

def test_default_checkpoint_schedule_is_valid():
    check_schedule(CHECKPOINTS)

@pytest.fixture(scope="module")
def crowd_pool():
    return generate_pool(small_synth_config(frames_per_class=12, subjects=6, crowd_annotators=30))

def test_cycling_first_checkpoint_draws_three_each(crowd_pool):
    snapshots = simulate_draws(crowd_pool, [3], "cycling", seed=0)
    assert all(d.total_drawn == 3 for d in snapshots[0].distributions)

@pytest.mark.parametrize("condition", ["cycling", "active"])
@pytest.mark.parametrize("entropy_source", ["drawn", "reference"])
def test_drawn_totals_follow_schedule(crowd_pool, condition, entropy_source):
    """At checkpoint s every condition has spent s * N labels."""
    snapshots = simulate_draws(crowd_pool, [3, 9, 15], condition, seed=1, entropy_source=entropy_source)
    n = len(crowd_pool)
    assert [s.checkpoint for s in snapshots] == [3, 9, 15]
    assert [s.checkpoint_index for s in snapshots] == [1, 2, 3]
    for snapshot in snapshots:
        assert sum(d.total_drawn for d in snapshot.distributions) == snapshot.checkpoint * n
        assert all(d.total_drawn >= snapshot.checkpoint // 3 for d in snapshot.distributions)

def test_draws_are_cumulative(crowd_pool):
    first, second = simulate_draws(crowd_pool, [3, 6], "active", seed=2)
    before, after = first.drawn_by_frame(), second.drawn_by_frame()
    for frame_id, counts in before.items():
        assert all(b <= a for b, a in zip(counts, after[frame_id]))

def test_active_draws_more_on_uncertain_frames():
    """Frames with split votes end up with more draws than unanimous ones."""
    frames = [make_frame(f"u{i:02d}", crowd_counts=(100, 0)) for i in range(30)]
    frames += [make_frame(f"z{i}", crowd_counts=(50, 50)) for i in range(10)]
    pool = make_pool(frames, 2)
    snapshot, = simulate_draws(pool, [30], "active", seed=0, entropy_source="reference")
    drawn = snapshot.drawn_by_frame()
    assert min(sum(drawn[f"z{i}"]) for i in range(10)) > max(sum(drawn[f"u{i:02d}"]) for i in range(30))

def test_draws_need_counts():
    pool = random_pool(5, class_count=2, feature_dim=2, subjects=2, seed=0)
    with pytest.raises(MissingCrowdCountsError):
        simulate_draws(pool, [3], "cycling", seed=0)

def test_experiment_records(crowd_pool):
    folds = split_folds(crowd_pool, 2, 2 / 3, seed=0)
    records = run_crowd_experiment(crowd_pool, folds, [3, 6, 12], "active", "soft", "one_hot",
                                   FAST_TRAINING, seed=0, final_epochs=2)
    assert len(records) == 2 * 3
    assert sorted({r.labels_used for r in records}) == [3, 6, 12]
    assert {r.fold for r in records} == {0, 1}
    for record in records:
        assert record.metric == "cross_entropy"
        assert record.strategy == "active"
        assert (record.train_mode, record.test_mode) == ("soft", "one_hot")
        assert record.mean > 0 and record.std >= 0

def test_experiment_is_deterministic(crowd_pool):
    folds = split_folds(crowd_pool, 1, 2 / 3, seed=4)
    def run():
        return run_crowd_experiment(crowd_pool, folds, [3, 6], "cycling", "one_hot", "one_hot",
                                    FAST_TRAINING, seed=4, final_epochs=2)
    assert run() == run()

def test_single_epoch_window_has_zero_std(crowd_pool):
    folds = split_folds(crowd_pool, 1, 2 / 3, seed=0)
    records = run_crowd_experiment(crowd_pool, folds, [3], "cycling", "soft", "soft",
                                   FAST_TRAINING, seed=0, final_epochs=1)
    assert records[0].std == 0.0
