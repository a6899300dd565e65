from typing import Any, Dict, Optional
from alsim.shared.exceptions.component import ComponentError

class DatasetError(ComponentError):
    """Base exception for pool, fold and CSV errors"""
    def __init__(
        self,
        message: str,
        error_code: str,
        details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(
            message=message,
            error_code=error_code,
            component="dataset",
            details=details
        )

class PoolFormatError(DatasetError):
    """Raised when a pool CSV cell or row cannot be parsed"""
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column!r}")
        super().__init__(
            message=f"{message} ({', '.join(location)})" if location else message,
            error_code="format_error",
            details={"row": row, "column": column, **(details or {})}
        )

class PoolConsistencyError(DatasetError):
    """Raised when parsed frames do not form a valid pool"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, error_code="inconsistent_pool", details=details)

class FoldSplitError(DatasetError):
    """Raised when subjects cannot be split into folds"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message=message, error_code="fold_split", details=details)

class BalancedSubsetError(DatasetError):
    """Raised when a frame lacks an attribute needed for balancing"""
    def __init__(self, message: str, frame_id: str, details: Optional[Dict[str, Any]] = None):
        self.frame_id = frame_id
        super().__init__(
            message=message,
            error_code="balanced_subset",
            details={"frame_id": frame_id, **(details or {})}
        )

class ResultWriteError(DatasetError):
    """Raised when a result CSV cannot be written"""
    def __init__(self, message: str, path: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            error_code="write_error",
            details={"path": path, **(details or {})}
        )
