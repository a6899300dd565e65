from typing import Any, Dict, Optional
from alsim.shared.exceptions.component import ComponentError

class ClassifierError(ComponentError):
    """Base exception for classifier errors"""
    def __init__(
        self,
        message: str,
        error_code: str,
        details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(
            message=message,
            error_code=error_code,
            component="classifier",
            details=details
        )

class DimensionMismatchError(ClassifierError):
    """Raised when a vector has the wrong length for the model"""
    def __init__(self, message: str, expected: int, actual: int):
        super().__init__(
            message=message,
            error_code="dimension_mismatch",
            details={"expected": expected, "actual": actual}
        )

class EmptyTrainingSetError(ClassifierError):
    """Raised when train is called without frames"""
    def __init__(self, message: str = "training set is empty"):
        super().__init__(message=message, error_code="empty_training_set")

class TargetAlignmentError(ClassifierError):
    """Raised when targets do not line up with frames"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, error_code="target_alignment", details=details)

class EvaluationError(ClassifierError):
    """Raised when an evaluation set is empty or lacks the labels a mode needs"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, error_code="evaluation", details=details)
