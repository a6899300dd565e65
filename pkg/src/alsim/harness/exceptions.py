from typing import Any, Dict, List, Optional, Tuple
from alsim.shared.exceptions.component import ComponentError

class HarnessError(ComponentError):
    """Base exception for experiment orchestration"""
    def __init__(
        self,
        message: str,
        error_code: str,
        details: Optional[Dict[str, Any]] = None
    ):
        super().__init__(
            message=message,
            error_code=error_code,
            component="harness",
            details=details
        )

class ConfigError(HarnessError):
    """Raised when a config does not validate; carries every problem"""
    def __init__(self, problems: List[str]):
        self.problems = problems
        super().__init__(
            message="invalid config: " + "; ".join(problems),
            error_code="invalid_config",
            details={"problems": problems}
        )

class CellFailureError(HarnessError):
    """Raised when one experiment cell fails; names the cell"""
    def __init__(self, cell: Tuple[Any, ...], error: Exception):
        self.cell = cell
        super().__init__(
            message=f"cell {cell} failed: {error}",
            error_code="cell_failure",
            details={"cell": list(cell), "error": str(error), "error_type": type(error).__name__}
        )
