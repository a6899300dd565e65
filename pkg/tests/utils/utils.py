from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from alsim.dataset.schemas import Frame, Pool
from alsim.synth.schemas import SynthConfig

def get_test_data_dir() -> Path:
    """Get the test data directory path."""
    return Path(__file__).parent.parent / "data"

def get_data_file(filename: str) -> Path:
    """Path of a sample file under tests/data."""
    return get_test_data_dir() / filename

def make_frame(
    frame_id: str,
    subject_id: str = "s0",
    features: Sequence[float] = (0.0, 0.0),
    auto_label: Optional[int] = None,
    true_label: Optional[int] = 0,
    crowd_counts: Optional[Sequence[int]] = None,
    attributes: Optional[Dict[str, str]] = None
) -> Frame:
    """Build a Frame with test-friendly defaults."""
    return Frame(
        frame_id=frame_id,
        subject_id=subject_id,
        features=tuple(float(x) for x in features),
        auto_label=auto_label,
        true_label=true_label,
        crowd_counts=None if crowd_counts is None else tuple(crowd_counts),
        attributes=attributes or {}
    )

def make_pool(frames: List[Frame], class_count: int) -> Pool:
    return Pool(frames=tuple(frames), class_count=class_count)

def random_pool(
    n_frames: int,
    class_count: int,
    feature_dim: int,
    subjects: int,
    seed: int,
    with_counts: bool = False
) -> Pool:
    """Pool of Gaussian noise frames with random labels, for property-style tests."""
    rng = np.random.default_rng(seed)
    frames = []
    for i in range(n_frames):
        label = int(rng.integers(class_count))
        counts = None
        if with_counts:
            counts = tuple(int(c) for c in rng.multinomial(20, np.full(class_count, 1.0 / class_count)))
        frames.append(make_frame(
            frame_id=f"f{i:04d}",
            subject_id=f"s{i % subjects}",
            features=rng.normal(size=feature_dim),
            auto_label=int(rng.integers(class_count)),
            true_label=label,
            crowd_counts=counts
        ))
    return make_pool(frames, class_count)

def small_synth_config(**overrides) -> SynthConfig:
    """A synthetic recipe small enough for unit tests."""
    values = dict(
        class_count=3, feature_dim=4, frames_per_class=20, subjects=6,
        auto_label_noise=0.2, crowd_annotators=20, crowd_confusion=0.3, seed=7
    )
    values.update(overrides)
    return SynthConfig(**values)
