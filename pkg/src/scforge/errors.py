"""Exception hierarchy shared by every scforge module."""

from __future__ import annotations


class ForgeError(Exception):
    """Base class for all scforge errors."""


class NonStochasticDistribution(ForgeError, ValueError):
    pass


class DimensionMismatch(ForgeError, ValueError):
    pass


class ZeroAlphabet(ForgeError, ValueError):
    pass


class UnsupportedFormat(ForgeError, ValueError):
    pass


class CandidateExplosion(ForgeError, RuntimeError):
    pass


class EmptySet(ForgeError, ValueError):
    pass


class WeightOutOfRange(ForgeError, ValueError):
    pass


class CliqueWeightOverflow(ForgeError, ValueError):
    pass


class GraphTooLarge(ForgeError, RuntimeError):
    pass


class InvalidAlpha(ForgeError, ValueError):
    pass


class ConditionUnsatisfied(ForgeError):
    """A bound was requested whose sufficient condition does not hold."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ResampleCapExceeded(ForgeError, RuntimeError):
    """The resampling budget ran out before every bad event was avoided.

    The last assignment and the run statistics are attached so the caller
    can inspect where the run got stuck.
    """

    def __init__(self, message: str, assignment=None, stats=None):
        super().__init__(message)
        self.assignment = assignment
        self.stats = stats


class OrbitTooLarge(ForgeError, RuntimeError):
    pass


class SpaceTooLarge(ForgeError, RuntimeError):
    pass


class UnknownCommand(ForgeError, ValueError):
    pass


class BadFlag(ForgeError, ValueError):
    pass
