from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import optimize

from alsim.dataset.schemas import MetricRecord
from alsim.dataset.integrations.csv import format_float
from alsim.curvefit.schemas import PowerLawParams, LearningCurve
from alsim.curvefit.exceptions import (
    InsufficientPointsError, DegenerateCurveError, InvalidExponentError
)
from alsim.core.logging import get_logger, log_event

logger = get_logger(__name__)

ParamsLike = Union[PowerLawParams, Tuple[float, float, float], Sequence[float]]

EXPONENT_GRID = (0.1, 0.25, 0.5, 0.75, 1.0)
MAX_EVALUATIONS = 2000
# dense exponent scan; its best points seed extra Levenberg-Marquardt runs
PROFILE_GRID = np.round(np.linspace(-2.0, 3.0, 501), 4)
PROFILE_STARTS = 3
STEP_TOLERANCE = 1e-9
FIT_COLUMNS = ["metric", "a", "b", "c", "residual_rms", "n_points", "strategy"]

def _as_tuple(params: ParamsLike) -> Tuple[float, float, float]:
    if isinstance(params, PowerLawParams):
        return params.as_tuple()
    a, b, c = params
    return float(a), float(b), float(c)

def predict(params: ParamsLike, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """f(x) = (1 - a) - b * x**c"""
    a, b, c = _as_tuple(params)
    value = (1.0 - a) - b * np.power(np.asarray(x, dtype=float), c)
    return float(value) if np.ndim(value) == 0 else value

def labels_for_target(params: ParamsLike, target: float) -> Optional[float]:
    """
    Label count at which the curve reaches target: ((1 - a - target) / b) ** (1 / c).
    
    Returns None when the curve never gets there (flat curve, or target on the
    far side of the asymptote 1 - a).
    """
    a, b, c = _as_tuple(params)
    if c == 0:
        raise InvalidExponentError()
    if b == 0:
        return None
    base = (1.0 - a - target) / b
    if base <= 0:
        return None
    return float(base ** (1.0 / c))

def _linear_ab(x: np.ndarray, y: np.ndarray, c: float) -> Tuple[float, float]:
    """Least-squares (a, b) for a fixed exponent"""
    design = np.column_stack([np.ones_like(x), np.power(x, c)])
    (alpha, beta), *_ = np.linalg.lstsq(design, y, rcond=None)
    return 1.0 - alpha, -beta

def _profile_sse(x: np.ndarray, y: np.ndarray, c: float) -> float:
    a, b = _linear_ab(x, y, c)
    r = y - predict((a, b, c), x)
    return float(r @ r)

def _residuals(theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return predict(theta, x) - y

def _jacobian(theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    _, b, c = theta
    xc = np.power(x, c)
    return np.column_stack([-np.ones_like(x), -xc, -b * xc * np.log(x)])

def _starts(x: np.ndarray, y: np.ndarray) -> List[float]:
    """The fixed exponent grid plus the best exponents of a dense profile scan"""
    scan = [c for c in PROFILE_GRID if c != 0.0]
    sse = np.array([_profile_sse(x, y, c) for c in scan])
    best = [scan[i] for i in np.argsort(sse, kind="stable")[:PROFILE_STARTS]]
    return list(EXPONENT_GRID) + [c for c in best if c not in EXPONENT_GRID]

def _polish(x: np.ndarray, y: np.ndarray, c0: float) -> Optional[Tuple[np.ndarray, float]]:
    """Levenberg-Marquardt from the linear (a, b) optimum at exponent c0"""
    a0, b0 = _linear_ab(x, y, c0)
    start = np.array([a0, b0, c0])
    try:
        with np.errstate(over='ignore', invalid='ignore'):
            result = optimize.least_squares(
                _residuals, start, jac=_jacobian, args=(x, y), method="lm",
                xtol=STEP_TOLERANCE, ftol=1e-12, gtol=1e-12, max_nfev=MAX_EVALUATIONS
            )
    except ValueError as e:
        logger.debug("Start c=%.3g skipped: %s", c0, e)
        return None
    theta = result.x
    r = _residuals(theta, x, y)
    sse = float(r @ r)
    if not (np.all(np.isfinite(theta)) and np.isfinite(sse)):
        return None
    start_sse = _profile_sse(x, y, c0)
    if start_sse < sse:
        return start, start_sse
    return theta, sse

@log_event(__name__)
def fit_power_law(points: Sequence[Tuple[float, float]]) -> LearningCurve:
    """
    Least-squares fit of f(x) = (1 - a) - b * x**c.
    
    Each exponent in the grid, plus the best few of a dense exponent scan,
    seeds a Levenberg-Marquardt run (scipy least_squares) from the (a, b)
    that is optimal for that exponent; the lowest residual wins. b is left
    unconstrained in sign.
    """
    if len(points) < 4:
        raise InsufficientPointsError(len(points))
    ordered = sorted((float(x), float(y)) for x, y in points)
    x = np.array([p[0] for p in ordered])
    y = np.array([p[1] for p in ordered])
    if np.all(x == x[0]):
        raise DegenerateCurveError("all x values are equal", details={"x": float(x[0])})
    if np.any(np.diff(x) == 0):
        raise DegenerateCurveError("x values must be distinct")
    if np.any(x < 1):
        raise DegenerateCurveError("x values must be at least 1", details={"min_x": float(x.min())})

    best_theta, best_sse = None, np.inf
    for c0 in _starts(x, y):
        fitted = _polish(x, y, c0)
        if fitted is not None and fitted[1] < best_sse:
            best_theta, best_sse = fitted
    if best_theta is None:
        raise DegenerateCurveError("no start converged to a finite fit")

    a, b, c = (float(v) for v in best_theta)
    logger.info("Fitted power law a=%.6g b=%.6g c=%.6g on %d points", a, b, c, len(x))
    return LearningCurve(
        points=ordered,
        params=PowerLawParams(a=a, b=b, c=c),
        residual_rms=float(np.sqrt(best_sse / len(x)))
    )

@log_event(__name__)
def fit_metrics(records: Sequence[MetricRecord], metric: str = "accuracy") -> List[LearningCurve]:
    """
    One power-law fit per strategy; y is the mean metric over seeds and folds
    at each labels_used value. Strategies with fewer than 4 distinct label
    counts are logged and skipped.
    """
    table = pd.DataFrame([r.model_dump() for r in records if r.metric == metric])
    if table.empty:
        return []
    curves = []
    for strategy, group in table.groupby("strategy", sort=True):
        means = group.groupby("labels_used", sort=True)["mean"].mean()
        if len(means) < 4:
            logger.warning("Skipping %s fit for %s: %d distinct label counts, need 4",
                           metric, strategy, len(means))
            continue
        curve = fit_power_law(list(zip(means.index.astype(float), means.to_numpy())))
        curves.append(curve.model_copy(update={"metric": metric, "strategy": str(strategy)}))
    return curves

def fit_rows(curves: Sequence[LearningCurve]) -> List[Dict[str, str]]:
    """fits.csv rows for the given curves"""
    return [{
        "metric": curve.metric or "",
        "a": format_float(curve.params.a),
        "b": format_float(curve.params.b),
        "c": format_float(curve.params.c),
        "residual_rms": format_float(curve.residual_rms),
        "n_points": str(len(curve.points)),
        "strategy": curve.strategy or ""
    } for curve in curves]
