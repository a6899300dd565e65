from typing import Any, Dict, Optional
from alsim.shared.exceptions.component import ComponentError

class SelectionError(ComponentError):
    """Base exception for query strategy errors"""
    def __init__(
        self,
        message: str,
        error_code: str = "selection_error",
        details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(
            message=message,
            error_code=error_code,
            component="selection",
            details=details
        )

class NotNormalizedError(SelectionError):
    """Raised when a probability vector does not sum to 1"""
    def __init__(self, total: float):
        super().__init__(
            message=f"probabilities sum to {total!r}, not 1",
            error_code="not_normalized",
            details={"sum": total}
        )

class MissingRevealLabelError(SelectionError):
    """Raised when a selected frame has no true label to reveal"""
    def __init__(self, frame_id: str):
        super().__init__(
            message=f"frame {frame_id!r} has no true_label to reveal",
            error_code="missing_true_label",
            details={"frame_id": frame_id}
        )
