from typing import Any, Dict, Optional
from alsim.shared.exceptions.component import ComponentError

class CurveFitError(ComponentError):
    """Base exception for learning-curve fitting"""
    def __init__(
        self,
        message: str,
        error_code: str,
        details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(
            message=message,
            error_code=error_code,
            component="curvefit",
            details=details
        )

class InsufficientPointsError(CurveFitError):
    """Raised when fewer than four points are given"""
    def __init__(self, n_points: int):
        super().__init__(
            message=f"need at least 4 points, got {n_points}",
            error_code="insufficient_points",
            details={"n_points": n_points}
        )

class DegenerateCurveError(CurveFitError):
    """Raised when x values do not spread"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, error_code="degenerate_x", details=details)

class InvalidExponentError(CurveFitError):
    """Raised when c = 0 makes the curve non-invertible"""
    def __init__(self):
        super().__init__(message="exponent c must be nonzero", error_code="invalid_exponent")
