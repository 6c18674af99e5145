"""Semantic exception hierarchy.

Public functions never raise a bare ValueError for contract violations;
callers can catch BarrierGapError to handle any library failure.
"""


class BarrierGapError(Exception):
    """Base error for this package."""


class DomainError(BarrierGapError, ValueError):
    """Input outside a function's mathematical domain (nu < 2, |x| >= 1, g < 0, ...)."""


class CurvatureError(DomainError):
    """Second-order data with h - p^2 <= 0; no admissible function can produce it."""


class EnvelopeBlowupError(BarrierGapError, ArithmeticError):
    """Extremal envelope evaluated past the end of its domain of definition
    (denominator of the closed form vanished)."""


class RegionError(BarrierGapError):
    """Slab queried at a point outside the planar feasible region."""


class DegenerateHullError(BarrierGapError):
    """Operation requires a full-dimensional hull but the mesh is rank-deficient."""


class CapExceededError(BarrierGapError):
    """Bisection predicate still false at the parameter cap."""


class TabularFormatError(BarrierGapError, ValueError):
    """Malformed tabulated derivative file; message names the offending line."""
