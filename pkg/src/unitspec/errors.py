"""Exception types shared across the package.

Each error carries a ``witness`` payload (JSON-friendly) so reports can show
exactly which simplex, morphism or law was at fault.
"""
from __future__ import annotations

from typing import Any


class UnitspecError(Exception):
    exit_code = 1

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class ConfigError(UnitspecError):
    """Bad user input; maps to exit code 2."""

    exit_code = 2


class InsufficientDimension(ConfigError):
    pass


class TruncationTooSmall(ConfigError):
    pass


class NotStabilized(ConfigError):
    pass


class InsufficientGammaRange(ConfigError):
    pass


class ObjectOutOfRange(ConfigError):
    pass


class MismatchedBase(ConfigError):
    pass


class NotAFunctor(UnitspecError):
    pass


class IdentityViolation(UnitspecError):
    """A simplicial or homotopy identity failed.

    ``q, i, j`` locate the first failing relation.
    """

    def __init__(self, message: str, q: int = -1, i: int = -1, j: int = -1, witness: Any = None):
        super().__init__(message, witness)
        self.q, self.i, self.j = q, i, j


class LawViolation(UnitspecError):
    def __init__(self, law: str, message: str, witness: Any = None):
        super().__init__(f"{law}: {message}", witness)
        self.law = law


class NotDkBacked(UnitspecError):
    pass


class BijectionFailure(UnitspecError):
    pass


class NotCommutative(UnitspecError):
    pass
