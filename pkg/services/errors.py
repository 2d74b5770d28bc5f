"""
Error types for cartankit

Fail fast, fail honestly: services raise, only the CLI boundary catches.
Every error is a ValueError so callers that only know the builtin still work.
"""

from typing import Any, Dict, Optional


class CartanKitError(ValueError):
    """Base class for all cartankit errors"""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}


class InvalidConfigError(CartanKitError):
    """Job configuration failed validation"""

    exit_code = 2


class NotASubalgebraError(CartanKitError):
    """Basis is dependent or not closed under bracket"""

    exit_code = 3


class NotInGroupError(CartanKitError):
    """Matrix is not a member of the group (form or determinant residual too large)"""

    exit_code = 3


class NonstandardFormError(CartanKitError):
    """Subalgebra could not be conjugated into a compatible standard form"""

    exit_code = 5


class ClassificationDefectError(CartanKitError):
    """Input matched no case of the classification; indicates a bug"""

    exit_code = 1


class ScaleOverflowError(CartanKitError):
    """Coefficients or exponentials left the double-precision range"""

    exit_code = 1


class InsufficientSpanError(CartanKitError):
    """Cloud does not span enough log-radius for an asymptotic test"""

    exit_code = 1
