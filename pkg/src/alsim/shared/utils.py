"""Probability helpers shared by the classifier, selection and crowd components."""
import numpy as np

# Floor applied before every log
PROB_FLOOR = 1e-12

def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with the max-logit shift."""
    z = np.atleast_2d(np.asarray(logits, dtype=float))
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)

def normalize_counts(counts: np.ndarray) -> np.ndarray:
    """Row-wise normalization of nonnegative count vectors."""
    c = np.atleast_2d(np.asarray(counts, dtype=float))
    return c / c.sum(axis=1, keepdims=True)

def one_hot(labels: np.ndarray, class_count: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    out = np.zeros((labels.shape[0], class_count), dtype=float)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out

def row_entropy(probabilities: np.ndarray) -> np.ndarray:
    """Natural-log entropy per row with 0 * ln 0 = 0."""
    p = np.atleast_2d(np.asarray(probabilities, dtype=float))
    logs = np.log(np.where(p > 0, p, 1.0))
    return -(p * logs).sum(axis=1)
