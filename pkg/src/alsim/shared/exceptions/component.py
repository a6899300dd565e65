from typing import Optional, Dict, Any
from alsim.shared.exceptions.base import BaseAppError

class ComponentError(BaseAppError):
    """Base exception for errors raised inside one simulation component"""
    def __init__(
        self,
        message: str,
        error_code: str,
        component: str,
        details: Optional[Dict[str, Any]] = None
    ):
        self.component = component
        super().__init__(
            message=f"{component} error: {message}",
            error_code=f"{component}_{error_code}",
            details=details
        )
