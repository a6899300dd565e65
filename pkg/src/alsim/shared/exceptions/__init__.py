"""
Common exception classes used across domains.
"""

from .base import BaseAppError
from .validation import ValidationErrorMixin
from .component import ComponentError

__all__ = [
    'BaseAppError', 'ValidationErrorMixin', 'ComponentError'
]
