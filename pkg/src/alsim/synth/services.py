from typing import Any, Dict, Union

import numpy as np
from pydantic import ValidationError

from alsim.dataset.schemas import Frame, Pool
from alsim.synth.schemas import SynthConfig
from alsim.synth.exceptions import SynthConfigError
from alsim.core.logging import get_logger, log_event

logger = get_logger(__name__)

def class_means(config: SynthConfig) -> np.ndarray:
    """Class c sits at e_c * separation / sqrt(2), so every pair is `separation` apart."""
    means = np.zeros((config.class_count, config.feature_dim))
    means[np.arange(config.class_count), np.arange(config.class_count)] = config.cluster_separation / np.sqrt(2.0)
    return means

def _other_class(labels: np.ndarray, class_count: int, rng: np.random.Generator) -> np.ndarray:
    """A uniformly random class different from each label"""
    return (labels + rng.integers(1, class_count, size=labels.shape)) % class_count

@log_event(__name__)
def generate_pool(config: Union[SynthConfig, Dict[str, Any]]) -> Pool:
    """
    Generate a synthetic pool of Gaussian class clusters.
    
    Frames are generated class-major (all of class 0, then class 1, ...) with
    subjects assigned round-robin over that order, then emitted in a seeded
    shuffled order with ids f0, f1, ... by position. Random draws happen in a
    fixed sequence (features, auto-label flips, crowd votes, order), so the pool is a
    pure function of the config.
    """
    if not isinstance(config, SynthConfig):
        try:
            config = SynthConfig.model_validate(config)
        except ValidationError as e:
            raise SynthConfigError("Invalid synthetic pool config", validation_error=e) from e

    rng = np.random.default_rng(config.seed)
    n = config.frame_count
    C = config.class_count
    true_labels = np.repeat(np.arange(C), config.frames_per_class)

    features = class_means(config)[true_labels] + rng.normal(
        0.0, config.within_class_std, size=(n, config.feature_dim)
    )

    flipped = rng.random(n) < config.auto_label_noise
    auto_labels = np.where(flipped, _other_class(true_labels, C, rng), true_labels)

    counts = None
    if config.crowd_annotators > 0:
        confusion = np.array([config.confusion_for(c) for c in range(C)])[true_labels]
        shape = (n, config.crowd_annotators)
        wrong = rng.random(shape) < confusion[:, None]
        votes = np.where(wrong, _other_class(np.broadcast_to(true_labels[:, None], shape), C, rng), true_labels[:, None])
        counts = np.stack([np.bincount(row, minlength=C) for row in votes])

    # ids follow a seeded shuffle so frame order carries no class information
    order = rng.permutation(n)
    width = len(str(n - 1))
    subject_width = len(str(config.subjects - 1))
    frames = []
    for position, i in enumerate(order.tolist()):
        subject = i % config.subjects
        attributes = {}
        if config.attribute_groups > 0:
            attributes["group"] = f"g{subject % config.attribute_groups}"
        frames.append(Frame(
            frame_id=f"f{position:0{width}d}",
            subject_id=f"s{subject:0{subject_width}d}",
            features=tuple(float(x) for x in features[i]),
            auto_label=int(auto_labels[i]),
            true_label=int(true_labels[i]),
            crowd_counts=None if counts is None else tuple(int(c) for c in counts[i]),
            attributes=attributes
        ))

    logger.info("Generated %d synthetic frames (C=%d, D=%d, flip rate %.3f)",
                n, C, config.feature_dim, float(flipped.mean()))
    return Pool(frames=tuple(frames), class_count=C, feature_dim=config.feature_dim)
