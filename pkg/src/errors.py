from __future__ import annotations

from typing import Any, Dict, Optional


class SymmetraError(RuntimeError):
    """Base class for computational failures; the CLI reports `name` and exits 1."""

    @property
    def name(self) -> str:
        return type(self).__name__


class RepresentativeMismatch(SymmetraError):
    pass


class DegenerateSample(SymmetraError):
    pass


class NotAnAlgebra(SymmetraError):
    pass


class NotPSD(SymmetraError):
    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotInvariant(SymmetraError):
    def __init__(self, message: str, generator: Optional[int] = None):
        super().__init__(message)
        self.generator = generator


class UnverifiedIsomorphism(SymmetraError):
    pass


class ActionNotAutomorphism(SymmetraError):
    pass


class TooLarge(SymmetraError):
    pass


class NoInterior(SymmetraError):
    pass


class MaxIter(SymmetraError):
    pass


class WeakDualityViolation(SymmetraError):
    pass


class SDPAParseError(SymmetraError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NoNegativeValue(SymmetraError):
    """No negative P_k(s) found; `value` is still the formula applied to `minimum`."""

    def __init__(self, message: str, minimum: float, value: float):
        super().__init__(message)
        self.minimum = minimum
        self.value = value


class Infeasible(SymmetraError):
    def __init__(self, message: str, certificate: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.certificate = certificate or {}
