from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.metrics import f1_score

from alsim.dataset.schemas import Frame
from alsim.classifier.schemas import (
    ClassifierConfig, AdamState, ClassifierModel, TargetSet, TargetMode, EvaluationMetrics
)
from alsim.classifier.optim import Adam
from alsim.classifier.exceptions import (
    DimensionMismatchError, EmptyTrainingSetError, TargetAlignmentError, EvaluationError
)
from alsim.shared.utils import PROB_FLOOR, softmax, one_hot, normalize_counts
from alsim.core.logging import get_logger, log_event
from alsim.core.utils.data import as_generator

logger = get_logger(__name__)

FrameInput = Union[Sequence[Frame], np.ndarray]
EpochCallback = Callable[[int, ClassifierModel], None]

def init_model(
    class_count: int,
    feature_dim: int,
    config: Optional[ClassifierConfig] = None,
    seed: Union[int, np.random.Generator] = 0
) -> ClassifierModel:
    """
    Fresh model: zeros for linear softmax, U(-1/sqrt(fan_in), 1/sqrt(fan_in))
    weights and zero biases when there is a hidden layer.
    """
    config = config or ClassifierConfig()
    shapes = ClassifierModel.param_shapes(feature_dim, class_count, config.hidden_units)
    if config.hidden_units == 0:
        params = {name: np.zeros(shape) for name, shape in shapes.items()}
    else:
        rng = as_generator(seed)
        params = {}
        for layer in ("1", "2"):
            fan_in = shapes[f"W{layer}"][0]
            bound = 1.0 / np.sqrt(max(fan_in, 1))
            params[f"W{layer}"] = rng.uniform(-bound, bound, size=shapes[f"W{layer}"])
            params[f"b{layer}"] = np.zeros(shapes[f"b{layer}"])
    return ClassifierModel(
        class_count=class_count,
        feature_dim=feature_dim,
        hidden_units=config.hidden_units,
        params=params,
        adam=AdamState(),
        config=config
    )

def as_feature_matrix(frames: FrameInput, feature_dim: int) -> np.ndarray:
    if isinstance(frames, np.ndarray):
        X = np.atleast_2d(frames.astype(float))
    elif len(frames) == 0:
        return np.zeros((0, feature_dim))
    else:
        X = np.asarray([frame.features for frame in frames], dtype=float)
    if X.shape[1] != feature_dim:
        raise DimensionMismatchError(
            f"features have length {X.shape[1]}, model expects {feature_dim}",
            expected=feature_dim, actual=X.shape[1]
        )
    return X

def _forward(params: Dict[str, np.ndarray], X: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Returns (probabilities, hidden activations or None)"""
    if "W" in params:
        return softmax(X @ params["W"] + params["b"]), None
    hidden = np.tanh(X @ params["W1"] + params["b1"])
    return softmax(hidden @ params["W2"] + params["b2"]), hidden

def predict_proba(model: ClassifierModel, features: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    """
    Class probabilities for one feature vector (returns shape (C,)) or a
    matrix of them (returns shape (n, C)).
    """
    x = np.asarray(features, dtype=float)
    single = x.ndim == 1
    if x.shape[-1] != model.feature_dim:
        raise DimensionMismatchError(
            f"features have length {x.shape[-1]}, model expects {model.feature_dim}",
            expected=model.feature_dim, actual=x.shape[-1]
        )
    probabilities, _ = _forward(model.params, np.atleast_2d(x))
    return probabilities[0] if single else probabilities

def cross_entropy_rows(predicted: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Per-row -sum t * ln(max(p, 1e-12))"""
    predicted = np.atleast_2d(predicted)
    targets = np.atleast_2d(targets)
    return -(targets * np.log(np.maximum(predicted, PROB_FLOOR))).sum(axis=1)

def cross_entropy(predicted: Sequence[float], target: Sequence[float]) -> float:
    """Categorical cross-entropy (natural log) of one prediction against one target."""
    p = np.asarray(predicted, dtype=float)
    t = np.asarray(target, dtype=float)
    if p.shape != t.shape:
        raise DimensionMismatchError("predicted and target lengths differ", expected=t.size, actual=p.size)
    return float(cross_entropy_rows(p, t)[0])

def loss_and_gradients(
    model: ClassifierModel, X: np.ndarray, T: np.ndarray
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Mean cross-entropy over the rows of X and its gradient for every parameter."""
    params = model.params
    P, hidden = _forward(params, X)
    loss = float(cross_entropy_rows(P, T).mean())
    delta = (P - T) / X.shape[0]
    if hidden is None:
        return loss, {"W": X.T @ delta, "b": delta.sum(axis=0)}
    d_hidden = (delta @ params["W2"].T) * (1.0 - hidden ** 2)
    return loss, {
        "W2": hidden.T @ delta,
        "b2": delta.sum(axis=0),
        "W1": X.T @ d_hidden,
        "b1": d_hidden.sum(axis=0)
    }

@log_event(__name__)
def train(
    model: ClassifierModel,
    frames: FrameInput,
    targets: TargetSet,
    epochs: int,
    batch_size: int,
    seed: Union[int, np.random.Generator],
    epoch_callback: Optional[EpochCallback] = None
) -> ClassifierModel:
    """
    Shuffled mini-batch Adam on categorical cross-entropy.
    
    The input model is left untouched; a trained copy is returned. Given the
    same inputs and seed the result is bit-identical.
    
    Args:
        model: Starting model (its Adam state continues)
        frames: Frames or an (n, D) feature matrix
        targets: One target row per frame
        epochs: Passes over the data; 0 returns an unchanged copy
        batch_size: Mini-batch size
        seed: Seed or generator for shuffling and jitter
        epoch_callback: Called as callback(epoch, model) after each epoch
        
    Returns:
        Trained copy of the model
    """
    X = as_feature_matrix(frames, model.feature_dim)
    if X.shape[0] == 0:
        raise EmptyTrainingSetError()
    T = targets.targets
    if T.shape != (X.shape[0], model.class_count):
        raise TargetAlignmentError(
            "targets do not align with frames",
            details={"frames": X.shape[0], "target_shape": list(T.shape)}
        )
    if batch_size < 1:
        raise ValueError("batch_size must be at least 1")

    trained = model.copy()
    optimizer = Adam(trained.config, trained.adam)
    rng = as_generator(seed)
    jitter = trained.config.jitter_std
    n = X.shape[0]

    for epoch in range(epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            xb = X[batch]
            if jitter > 0:
                xb = xb + rng.normal(0.0, jitter, size=xb.shape)
            loss, grads = loss_and_gradients(trained, xb, T[batch])
            optimizer.step(trained.params, grads)
            total += loss * len(batch)
        trained.epoch_losses.append(total / n)
        if epoch_callback is not None:
            epoch_callback(epoch, trained)
    return trained

def gradient_check(
    model: ClassifierModel,
    frame: Union[Frame, Sequence[float], np.ndarray],
    target: Sequence[float],
    h: float = 1e-5
) -> float:
    """
    Max relative error between analytic and central-difference gradients of
    the single-frame loss over every weight.
    
    Relative error is |a - n| / max(|a| + |n|, 1e-6); the floor keeps entries
    with vanishing gradient from dominating.
    """
    features = frame.features if isinstance(frame, Frame) else frame
    x = np.atleast_2d(np.asarray(features, dtype=float))
    t = np.atleast_2d(np.asarray(target, dtype=float))
    _, analytic = loss_and_gradients(model, x, t)

    perturbed = model.copy()
    worst = 0.0
    for name, param in perturbed.params.items():
        flat = param.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + h
            plus, _ = loss_and_gradients(perturbed, x, t)
            flat[i] = original - h
            minus, _ = loss_and_gradients(perturbed, x, t)
            flat[i] = original
            numeric = (plus - minus) / (2.0 * h)
            a = analytic[name].reshape(-1)[i]
            worst = max(worst, abs(a - numeric) / max(abs(a) + abs(numeric), 1e-6))
    return worst

def default_targets(frames: Sequence[Frame], mode: TargetMode, class_count: int) -> TargetSet:
    """One-hot targets from true labels, or soft targets from crowd counts."""
    if mode == "one_hot":
        missing = [f.frame_id for f in frames if f.true_label is None]
        if missing:
            raise EvaluationError("one_hot evaluation needs true labels", details={"frame_ids": missing[:5]})
        return TargetSet(mode=mode, targets=one_hot(np.array([f.true_label for f in frames]), class_count))
    missing = [f.frame_id for f in frames if f.crowd_counts is None]
    if missing:
        raise EvaluationError("soft evaluation needs crowd counts", details={"frame_ids": missing[:5]})
    return TargetSet(mode=mode, targets=normalize_counts(np.array([f.crowd_counts for f in frames])))

@log_event(__name__)
def evaluate(
    model: ClassifierModel,
    frames: FrameInput,
    mode: TargetMode = "one_hot",
    targets: Optional[TargetSet] = None
) -> EvaluationMetrics:
    """
    Accuracy, macro-F1 and mean cross-entropy of the model on frames.
    
    Without explicit targets, one_hot mode scores against true labels and soft
    mode against normalized crowd counts. Accuracy and macro-F1 (classes absent
    from both predictions and truth count as F1 = 0) are reported in one_hot
    mode only.
    """
    X = as_feature_matrix(frames, model.feature_dim)
    if X.shape[0] == 0:
        raise EvaluationError("evaluation set is empty")
    if targets is None:
        if isinstance(frames, np.ndarray):
            raise EvaluationError("targets are required when frames are given as a matrix")
        targets = default_targets(frames, mode, model.class_count)
    if len(targets) != X.shape[0]:
        raise TargetAlignmentError("targets do not align with frames",
                                   details={"frames": X.shape[0], "targets": len(targets)})

    P = predict_proba(model, X)
    mean_ce = float(cross_entropy_rows(P, targets.targets).mean())
    if mode != "one_hot":
        return EvaluationMetrics(mean_cross_entropy=mean_ce)

    truth = targets.labels
    predicted = P.argmax(axis=1)
    macro_f1 = f1_score(truth, predicted, labels=list(range(model.class_count)),
                        average="macro", zero_division=0)
    return EvaluationMetrics(
        accuracy=float((predicted == truth).mean()),
        macro_f1=float(macro_f1),
        mean_cross_entropy=mean_ce
    )
