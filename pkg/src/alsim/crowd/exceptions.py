from typing import Any, Dict, Optional
from alsim.shared.exceptions.component import ComponentError

class CrowdError(ComponentError):
    """Base exception for crowd sampling and budget errors"""
    def __init__(
        self,
        message: str,
        error_code: str,
        details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(
            message=message,
            error_code=error_code,
            component="crowd",
            details=details
        )

class EmptyDistributionError(CrowdError):
    """Raised when a vote vector sums to zero"""
    def __init__(self, message: str, frame_id: Optional[str] = None):
        super().__init__(message=message, error_code="empty_distribution", details={"frame_id": frame_id})

class BudgetError(CrowdError):
    """Raised when a budget cannot be allocated"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, error_code="budget", details=details)

class CrowdScheduleError(CrowdError):
    """Raised for checkpoint schedules the round structure cannot reach"""
    def __init__(self, message: str, schedule: Any):
        super().__init__(message=message, error_code="schedule", details={"schedule": list(schedule)})

class MissingCrowdCountsError(CrowdError):
    """Raised when frames lack reference crowd counts"""
    def __init__(self, message: str, frame_ids: Optional[list] = None):
        super().__init__(message=message, error_code="missing_crowd_counts", details={"frame_ids": frame_ids or []})
