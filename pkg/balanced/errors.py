"""
Exception hierarchy shared by services and the CLI
"""

from typing import Any, Optional


class BalancedError(Exception):
    """Base class for toolkit errors"""


class SizeLimitError(BalancedError, ValueError):
    """An input exceeds a configured or algorithmic size limit"""


class PreconditionError(BalancedError, ValueError):
    """An operation was called with inputs that violate its precondition"""


class VerificationError(BalancedError, RuntimeError):
    """An internal cross-check failed (exact arithmetic disagreement, oracle mismatch)"""


class ResourceLimitError(BalancedError, RuntimeError):
    """A run was aborted after exhausting its budget"""

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial
